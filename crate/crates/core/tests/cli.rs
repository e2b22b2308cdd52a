mod common;

use std::path::Path;
use std::process::{Command, Output};

use esdf_explore::grid::{io, signed_distance_transform, Cell};
use esdf_explore::harness::{load_grid, parse_trajectory};
use esdf_explore::planner::parse_path_csv;
use esdf_explore::sim::World;

fn cli(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esdf-explore"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn edt_corridor_peaks_on_the_centerline() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["edt", "builtin:corridor"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let esdf = io::read_esdf_csv(&dir.path().join("corridor_esdf.csv")).unwrap();
    let g = *esdf.geometry();
    let (_, grid) = load_grid("builtin:corridor", 70.0).unwrap();
    // Interior rows between the two long walls; the middle one or two rows
    // carry the column maximum.
    let free_rows: Vec<usize> = (0..g.height).filter(|&r| !grid.is_occupied(Cell::new(r, g.width / 2))).collect();
    let (lo, hi) = (free_rows[0], *free_rows.last().unwrap());
    let mid = [(lo + hi) / 2, (lo + hi).div_ceil(2)];
    for col in 20..g.width - 20 {
        let best = (0..g.height).map(|r| esdf.get(Cell::new(r, col))).fold(f64::MIN, f64::max);
        for r in mid {
            assert_eq!(esdf.get(Cell::new(r, col)), best, "column {col}");
        }
    }
    assert!(dir.path().join("corridor_esdf.pgm").is_file());
}

#[test]
fn edt_csv_reloads_to_the_recomputed_field() {
    let dir = tempfile::tempdir().unwrap();
    for map in ["builtin:pillars", "builtin:junction"] {
        let o = cli(&["edt", map], dir.path());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let name = map.trim_start_matches("builtin:");
        let back = io::read_esdf_csv(&dir.path().join(format!("{name}_esdf.csv"))).unwrap();
        let (_, grid) = load_grid(map, 70.0).unwrap();
        assert_eq!(back, signed_distance_transform(&grid), "{map}");
    }
}

#[test]
fn edt_of_free_map_is_sentinel_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("open.txt");
    std::fs::write(&map, "; resolution = 0.5\n......\n......\n......\n").unwrap();
    let o = cli(&["edt", map.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let esdf = io::read_esdf_csv(&dir.path().join("open_esdf.csv")).unwrap();
    let diag = esdf.geometry().diagonal();
    assert!(esdf.cells().iter().all(|&d| d == diag));
}

#[test]
fn malformed_map_names_line_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("bad.txt");
    std::fs::write(&map, "####\n#S.#\n#.x#\n####\n").unwrap();
    let o = cli(&["edt", map.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("bad.txt:3:") && err.contains("column 3"), "{err}");
}

/// Open room with a wall across the middle that leaves a gap at the top.
fn wall_room(dir: &Path, gap: bool) -> std::path::PathBuf {
    let mut rows = Vec::new();
    for r in 0..20 {
        let row: String = (0..30)
            .map(|c| {
                if r == 0 || r == 19 || c == 0 || c == 29 || (c == 15 && (r > 5 || !gap)) {
                    '#'
                } else if r == 15 && c == 3 {
                    'S'
                } else {
                    '.'
                }
            })
            .collect();
        rows.push(row);
    }
    let file = dir.join(if gap { "gap.txt" } else { "closed.txt" });
    std::fs::write(&file, format!("; resolution = 0.1\n{}\n", rows.join("\n"))).unwrap();
    file
}

#[test]
fn plan_without_weights_matches_dijkstra() {
    let dir = tempfile::tempdir().unwrap();
    let map = wall_room(dir.path(), true);
    let o = cli(
        &["plan", map.to_str().unwrap(), "--start", "0.35,0.45", "--goal", "2.55,0.45", "--epsilon", "0", "--lambda", "0"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("gap_path.csv")).unwrap();
    let path = parse_path_csv("gap_path.csv", &text).unwrap();

    let (_, grid) = load_grid(map.to_str().unwrap(), 70.0).unwrap();
    let esdf = signed_distance_transform(&grid);
    let g = *esdf.geometry();
    let start = g.world_to_cell(0.35, 0.45).unwrap();
    let goal = g.world_to_cell(2.55, 0.45).unwrap();
    let optimum = common::dijkstra(&esdf, 0.3, start)[g.index(goal)].unwrap();
    assert!((path.total_cost - optimum.to_f64() * 0.1).abs() < 1e-9);
    assert!(!path.surrogate);
}

#[test]
fn plan_on_pillars_beats_baseline_clearance() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["plan", "builtin:pillars", "--start", "1.65,10.65", "--goal", "31.5,10.65"];
    assert_eq!(code(&cli(&args, dir.path())), 0);
    let mut base = args.to_vec();
    base.push("--baseline");
    assert_eq!(code(&cli(&base, dir.path())), 0);

    let world = World::builtin("pillars").unwrap();
    let esdf = world.truth_esdf();
    let min_clear = |file: &str| {
        let text = std::fs::read_to_string(dir.path().join(file)).unwrap();
        parse_path_csv(file, &text)
            .unwrap()
            .rows
            .iter()
            .map(|r| esdf.get(Cell::new(r.row, r.col)))
            .fold(f64::INFINITY, f64::min)
    };
    let (p, b) = (min_clear("pillars_path.csv"), min_clear("pillars_baseline_path.csv"));
    assert!(p > b, "proposed {p} vs baseline {b}");
}

#[test]
fn plan_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["plan", "builtin:junction", "--start", "1.45,17.25", "--goal", "17.0,30.0"];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let (oa, ob) = (cli(&args, &a), cli(&args, &b));
    assert_eq!(code(&oa), 0, "{}", stderr(&oa));
    assert_eq!(oa.stdout, ob.stdout);
    for f in ["junction_path.csv", "junction_path.pgm", "junction_path.meta"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn unreachable_goal_writes_flagged_surrogate_and_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let map = wall_room(dir.path(), false);
    let o = cli(&["plan", map.to_str().unwrap(), "--start", "0.35,0.45", "--goal", "2.55,0.45"], dir.path());
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("closed_path.csv")).unwrap();
    let path = parse_path_csv("closed_path.csv", &text).unwrap();
    assert!(path.surrogate);
    assert!(path.rows.iter().all(|r| r.col < 15));
}

#[test]
fn explore_summary_has_table_layout() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["explore", "--map", "builtin:corridor", "--seeds", "0..5"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert!(lines[0].contains("Exploration Time (s)"));
    for col in ["Avg", "Std", "Max", "Min"] {
        assert!(lines[1].contains(col));
    }
    let row = lines[2];
    assert!(row.starts_with("corridor") && row.contains("proposed") && row.contains("5/5 DONE"), "{row}");
    // The printed table equals the file.
    assert_eq!(String::from_utf8_lossy(&o.stdout), summary);
    for seed in 0..5 {
        for suffix in [".csv", "_timing.csv", "_summary.txt"] {
            assert!(dir.path().join(format!("corridor_proposed_seed{seed}{suffix}")).is_file());
        }
    }
}

#[test]
fn explore_time_limit_shows_in_log_and_trajectory_renders() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["explore", "--map", "builtin:tunnel_fork", "--seeds", "2", "--time-limit", "50"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let log = dir.path().join("tunnel_fork_proposed_seed2.csv");
    let text = std::fs::read_to_string(&log).unwrap();
    let first_return = text
        .lines()
        .find(|l| l.split(',').nth(2) == Some("RETURN_HOME"))
        .expect("no RETURN_HOME row");
    let fields: Vec<&str> = first_return.split(',').collect();
    assert_eq!(fields[0], "501");
    assert_eq!(fields[1], "50.1");
    assert_eq!(fields.last(), Some(&"time_limit"));

    let image = dir.path().join("traj.pgm");
    let r = Command::new(env!("CARGO_BIN_EXE_esdf-explore"))
        .args(["render", "builtin:tunnel_fork", "--log"])
        .arg(&log)
        .arg("--out")
        .arg(&image)
        .output()
        .unwrap();
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let grid = io::read_occupancy_pgm(&image).unwrap();
    let world = World::builtin("tunnel_fork").unwrap();
    assert_eq!(grid.geometry(), world.geometry());
    let bytes = std::fs::read(&image).unwrap();
    let (w, h, pixels) = io::decode_pgm("traj", &bytes).unwrap();
    let traj = parse_trajectory("log", &text).unwrap();
    for p in traj.iter().step_by(25) {
        let c = world.geometry().world_to_cell(p.x, p.y).unwrap();
        assert_eq!(pixels[(h - 1 - c.row) * w + c.col], esdf_explore::harness::PATH_GRAY);
    }
}

#[test]
fn missing_map_is_a_config_error_before_any_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never");
    let o = cli(&["explore", "--map", "/definitely/not/here.txt"], &out);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("does not exist"), "{}", stderr(&o));
    assert!(!out.exists());
    let o = cli(&["explore", "--map", "builtin:corridor", "--seeds", ""], &out);
    assert_eq!(code(&o), 2);
}

#[test]
fn explore_config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# short run\nmap = builtin:dead_end\nseeds = 4\nlambda_dist = 2\nmax_ticks = 30\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_esdf-explore"))
        .args(["explore", "--config"])
        .arg(&cfg)
        .args(["--seeds", "6", "--out"])
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    // Thirty ticks cannot finish the mission.
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let written = std::fs::read_to_string(dir.path().join("o/config.txt")).unwrap();
    assert!(written.contains("lambda_dist = 2\n") && written.contains("seeds = 6\n"), "{written}");
    assert!(dir.path().join("o/dead_end_proposed_seed6.csv").is_file());

    std::fs::write(&cfg, "lamda = 2\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_esdf-explore"))
        .args(["explore", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("p"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("run.cfg:1:"), "{}", stderr(&o));
}

#[test]
fn bench_covers_methods_maps_and_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(
        &["bench", "--maps", "builtin:dead_end,builtin:pillars", "--seeds", "0,1", "--no-scaling"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 2 * 2);
    for map in ["dead_end", "pillars"] {
        for method in ["proposed", "baseline"] {
            for seed in ["0", "1"] {
                assert!(rows.iter().any(|r| r[0] == map && r[1] == method && r[2] == seed), "{map} {method} {seed}");
                assert!(dir.path().join(format!("logs/{map}_{method}_seed{seed}.csv")).is_file());
            }
        }
    }
    // Where the baseline's clearance drops below d_safe the proposed method
    // must do at least as well.
    let min_clear = |map: &str, method: &str| {
        rows.iter()
            .filter(|r| r[0] == map && r[1] == method)
            .map(|r| r[10].parse::<f64>().unwrap())
            .fold(f64::INFINITY, f64::min)
    };
    let (p, b) = (min_clear("pillars", "proposed"), min_clear("pillars", "baseline"));
    assert!(b < 1.0 && p >= b, "pillars: proposed {p} vs baseline {b}");
    let table = std::fs::read_to_string(dir.path().join("bench.txt")).unwrap();
    assert_eq!(table.lines().count(), 2 + 4);
}

#[test]
fn ascii_worlds_round_trip() {
    for name in esdf_explore::sim::BUILTIN_MAPS {
        let w = World::builtin(name).unwrap();
        let back = World::parse_ascii(name, &w.to_ascii()).unwrap();
        assert_eq!(back.truth(), w.truth());
        assert_eq!(back.start.position(), w.start.position());
    }
}
