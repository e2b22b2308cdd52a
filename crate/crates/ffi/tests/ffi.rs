use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use esdf_explore::endpoint::{self, Point, Pose, ScanFrame};
use esdf_explore::grid::{self, BooleanGrid, GridGeometry};
use esdf_explore::planner::{self, CostModel};
use esdf_explore::PlannerConfig;
use esdf_explore_ffi::*;

const W: usize = 30;
const H: usize = 24;
const RES: f64 = 0.1;

/// Walled room with an internal wall that leaves a gap near the top.
fn room() -> Vec<u8> {
    let mut cells = vec![0u8; W * H];
    for r in 0..H {
        for c in 0..W {
            let edge = r == 0 || c == 0 || r == H - 1 || c == W - 1;
            let wall = c == 14 && r < 16;
            cells[r * W + c] = u8::from(edge || wall);
        }
    }
    cells
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ee_last_error_message()) }.to_string_lossy().into_owned()
}

fn make_esdf(cells: &[u8]) -> *mut EeEsdf {
    let mut grid = ptr::null_mut();
    assert_eq!(ee_grid_new(W, H, RES, 0.0, 0.0, cells.as_ptr(), &mut grid), EeStatus::Ok);
    let mut esdf = ptr::null_mut();
    assert_eq!(ee_esdf_compute(grid, &mut esdf), EeStatus::Ok);
    ee_grid_free(grid);
    esdf
}

fn core_esdf(cells: &[u8], w: usize, h: usize) -> esdf_explore::grid::EsdfGrid {
    let g = GridGeometry::new(w, h, RES, 0.0, 0.0).unwrap();
    let grid = BooleanGrid::from_cells(g, cells.iter().map(|&v| v != 0).collect()).unwrap();
    grid::signed_distance_transform(&grid)
}

#[test]
fn esdf_matches_exhaustive_search() {
    let cells = room();
    let esdf = make_esdf(&cells);
    assert_eq!((ee_esdf_width(esdf), ee_esdf_height(esdf)), (W, H));
    let mut values = vec![0.0; W * H];
    assert_eq!(ee_esdf_copy(esdf, values.as_mut_ptr(), values.len()), EeStatus::Ok);

    for r in 0..H {
        for c in 0..W {
            let occ = cells[r * W + c] != 0;
            let sq = (0..H * W)
                .filter(|&i| (cells[i] != 0) != occ)
                .map(|i| {
                    let (dr, dc) = ((i / W) as i64 - r as i64, (i % W) as i64 - c as i64);
                    dr * dr + dc * dc
                })
                .min()
                .unwrap();
            let d = (sq as f64).sqrt() * RES;
            let expected = if occ { -d } else { d };
            assert_eq!(values[r * W + c], expected, "cell ({r}, {c})");
            let mut one = 0.0;
            assert_eq!(ee_esdf_get(esdf, r, c, &mut one), EeStatus::Ok);
            assert_eq!(one, expected);
        }
    }

    let mut one = 0.0;
    assert_eq!(ee_esdf_get(esdf, H, 0, &mut one), EeStatus::InvalidArgument);
    assert!(last_error().contains("outside"), "{}", last_error());
    assert_eq!(ee_esdf_copy(esdf, values.as_mut_ptr(), 10), EeStatus::BufferTooSmall);
    ee_esdf_free(esdf);
}

#[test]
fn occupancy_threshold_and_unknown() {
    let mut probs = vec![0u8; W * H];
    probs[0] = 71;
    probs[1] = 70;
    probs[2] = 255;
    let mut grid = ptr::null_mut();
    assert_eq!(
        ee_grid_from_occupancy(W, H, RES, 0.0, 0.0, probs.as_ptr(), 70.0, &mut grid),
        EeStatus::Ok
    );
    let mut esdf = ptr::null_mut();
    assert_eq!(ee_esdf_compute(grid, &mut esdf), EeStatus::Ok);
    let mut d = [0.0; 3];
    for (i, v) in d.iter_mut().enumerate() {
        assert_eq!(ee_esdf_get(esdf, 0, i, v), EeStatus::Ok);
    }
    assert_eq!(d, [-RES, RES, 2.0 * RES]);
    ee_esdf_free(esdf);
    ee_grid_free(grid);

    probs[3] = 101;
    let mut grid = ptr::null_mut();
    assert_eq!(
        ee_grid_from_occupancy(W, H, RES, 0.0, 0.0, probs.as_ptr(), 70.0, &mut grid),
        EeStatus::InvalidGrid
    );
    assert!(grid.is_null());
}

#[test]
fn plans_match_the_library() {
    let cells = room();
    let esdf = make_esdf(&cells);
    let reference = core_esdf(&cells, W, H);
    let (start, goal) = (EePoint { x: 0.55, y: 0.55 }, EePoint { x: 2.45, y: 0.55 });

    for (baseline, config) in [
        (false, ee_planner_config_default()),
        (true, ee_planner_config_default()),
        (
            false,
            EePlannerConfig {
                epsilon: 0.0,
                lambda_dist: 0.0,
                ..ee_planner_config_default()
            },
        ),
    ] {
        let mut path = ptr::null_mut();
        assert_eq!(ee_plan(esdf, &config, baseline, start, goal, &mut path), EeStatus::Ok);

        let cfg = PlannerConfig::from(&config);
        let model = if baseline {
            CostModel::plain(cfg.r_robot)
        } else {
            CostModel::from_config(&cfg)
        };
        let expected = planner::plan(Point::new(start.x, start.y), Point::new(goal.x, goal.y), &reference, &model).unwrap();

        let n = ee_path_len(path);
        assert_eq!(n, expected.nodes.len());
        let mut points = vec![EePoint::default(); n];
        assert_eq!(ee_path_waypoints(path, points.as_mut_ptr(), n), EeStatus::Ok);
        let want: Vec<EePoint> = expected.waypoints().iter().map(|p| EePoint { x: p.x, y: p.y }).collect();
        assert_eq!(points, want);
        assert_eq!(ee_path_cost(path), expected.total_cost);
        assert_eq!(ee_path_length(path), expected.length());
        assert!(!ee_path_is_surrogate(path));
        assert_eq!(
            ee_path_waypoints(path, points.as_mut_ptr(), n - 1),
            EeStatus::BufferTooSmall
        );
        ee_path_free(path);
    }
    ee_esdf_free(esdf);
}

#[test]
fn unreachable_goal_gives_surrogate() {
    let mut cells = room();
    for r in 0..H {
        cells[r * W + 14] = 1;
    }
    let esdf = make_esdf(&cells);
    let config = ee_planner_config_default();
    let mut path = ptr::null_mut();
    let status = ee_plan(
        esdf,
        &config,
        false,
        EePoint { x: 0.55, y: 0.55 },
        EePoint { x: 2.45, y: 0.55 },
        &mut path,
    );
    assert_eq!(status, EeStatus::Ok);
    assert!(ee_path_is_surrogate(path));
    ee_path_free(path);

    let status = ee_plan(
        esdf,
        &config,
        false,
        EePoint { x: 0.05, y: 0.05 },
        EePoint { x: 2.45, y: 0.55 },
        &mut path,
    );
    assert_eq!(status, EeStatus::InvalidStart);
    assert!(path.is_null());
    assert!(last_error().contains("not traversable"), "{}", last_error());
    ee_esdf_free(esdf);
}

#[test]
fn null_arguments_are_reported() {
    let config = ee_planner_config_default();
    let mut esdf = ptr::null_mut();
    assert_eq!(ee_esdf_compute(ptr::null(), &mut esdf), EeStatus::NullPointer);
    assert_eq!(last_error(), "grid is null");
    assert_eq!(ee_esdf_compute(ptr::null(), ptr::null_mut()), EeStatus::NullPointer);
    assert_eq!(last_error(), "out is null");

    let mut grid = ptr::null_mut();
    assert_eq!(ee_grid_new(4, 4, 0.1, 0.0, 0.0, ptr::null(), &mut grid), EeStatus::NullPointer);
    assert_eq!(ee_grid_new(0, 4, 0.1, 0.0, 0.0, ptr::null(), &mut grid), EeStatus::InvalidGrid);
    assert!(!last_error().is_empty());

    let mut path = ptr::null_mut();
    let p = EePoint::default();
    assert_eq!(ee_plan(ptr::null(), &config, false, p, p, &mut path), EeStatus::NullPointer);
    assert_eq!(ee_path_len(ptr::null()), 0);
    assert!(ee_path_cost(ptr::null()).is_nan());
    assert!(ee_clamp_range(1.0, ptr::null()).is_nan());
    ee_grid_free(ptr::null_mut());
    ee_esdf_free(ptr::null_mut());
    ee_path_free(ptr::null_mut());

    // A successful call clears the message.
    assert_eq!(ee_planner_config_validate(&config), EeStatus::Ok);
    assert_eq!(last_error(), "");
}

#[test]
fn config_round_trip_and_validation() {
    let config = ee_planner_config_default();
    assert_eq!(PlannerConfig::from(&config), PlannerConfig::default());
    let bad = EePlannerConfig {
        r_robot: -1.0,
        ..config
    };
    assert_eq!(ee_planner_config_validate(&bad), EeStatus::Config);
    assert!(last_error().contains("r_robot"), "{}", last_error());
    assert!(!unsafe { CStr::from_ptr(ee_version()) }.to_bytes().is_empty());
}

#[test]
fn clamp_matches_the_rule() {
    let config = ee_planner_config_default();
    for (sigma, want) in [
        (f64::INFINITY, 5.0),
        (15.0, 4.0),
        (4.0, 4.0),
        (4.5, 4.0),
        (3.2, 3.2),
        (16.0, 16.0),
    ] {
        assert_eq!(ee_clamp_range(sigma, &config), want, "sigma {sigma}");
    }
}

fn scan(config: &EePlannerConfig, range: impl Fn(f64) -> f64) -> Vec<f64> {
    let cfg = PlannerConfig::from(config);
    (0..cfg.raw_beams).map(|i| range(endpoint::raw_beam_bearing(i, &cfg))).collect()
}

#[test]
fn endpoint_selection_matches_the_library() {
    let (w, h) = (111, 111);
    let mut cells = vec![0u8; w * h];
    cells[55 * w + 100] = 1;
    let mut grid = ptr::null_mut();
    assert_eq!(ee_grid_new(w, h, RES, 0.0, 0.0, cells.as_ptr(), &mut grid), EeStatus::Ok);
    let mut esdf = ptr::null_mut();
    assert_eq!(ee_esdf_compute(grid, &mut esdf), EeStatus::Ok);
    ee_grid_free(grid);

    let config = ee_planner_config_default();
    let pose = EePose { x: 5.55, y: 5.55, yaw: 0.3 };
    let ranges = scan(&config, |b| if b > 0.5 { f64::INFINITY } else { 3.0 });
    let mut out = EePoint::default();
    assert_eq!(
        ee_select_endpoint(&config, pose, ranges.as_ptr(), ranges.len(), esdf, &mut out),
        EeStatus::Ok
    );

    let cfg = PlannerConfig::from(&config);
    let frame = ScanFrame::new(ranges.clone(), cfg.fov_deg, 0.0).unwrap();
    let samples = endpoint::downsample_scan(&frame, &cfg).unwrap();
    let g = core_esdf(&cells, w, h);
    let want = endpoint::select_endpoint(&Pose::new(pose.x, pose.y, 0.0, pose.yaw), &samples, &g, &cfg).unwrap();
    assert_eq!((out.x, out.y), (want.position.x, want.position.y));
    assert!((out.x - pose.x).hypot(out.y - pose.y) > 4.0);

    let short = scan(&config, |_| 1.0);
    assert_eq!(
        ee_select_endpoint(&config, pose, short.as_ptr(), short.len(), esdf, &mut out),
        EeStatus::DeadEnd
    );
    assert!(last_error().starts_with("dead end"), "{}", last_error());
    assert_eq!(
        ee_select_endpoint(&config, pose, short.as_ptr(), 10, esdf, &mut out),
        EeStatus::MalformedScan
    );
    ee_esdf_free(esdf);
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/esdf_explore.h")
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(header()).unwrap();
    let source = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .split("pub extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20, "{exports:?}");
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    for name in ["typedef struct EeEsdf EeEsdf;", "EE_STATUS_DEAD_END = 6", "#ifndef ESDF_EXPLORE_H"] {
        assert!(header.contains(name), "{name}");
    }
}

const SMOKE: &str = r#"
#include <math.h>
#include <stdio.h>
#include "esdf_explore.h"

int main(void) {
    uint8_t cells[20 * 10] = {0};
    for (int c = 0; c < 20; c++) { cells[c] = 1; cells[9 * 20 + c] = 1; }
    for (int r = 0; r < 10; r++) { cells[r * 20] = 1; cells[r * 20 + 19] = 1; }
    EeGrid *grid = NULL;
    EeEsdf *esdf = NULL;
    EePath *path = NULL;
    if (ee_grid_new(20, 10, 0.1, 0.0, 0.0, cells, &grid) != EE_STATUS_OK) return 10;
    if (ee_esdf_compute(grid, &esdf) != EE_STATUS_OK) return 11;
    ee_grid_free(grid);
    double d = 0.0;
    if (ee_esdf_get(esdf, 4, 10, &d) != EE_STATUS_OK || fabs(d - 0.4) > 1e-12) return 12;
    EePlannerConfig cfg = ee_planner_config_default();
    cfg.r_robot = 0.1;
    EePoint a = {0.35, 0.45}, b = {1.65, 0.45};
    if (ee_plan(esdf, &cfg, false, a, b, &path) != EE_STATUS_OK) return 13;
    printf("%zu %.6f\n", ee_path_len(path), ee_path_length(path));
    ee_path_free(path);
    if (ee_plan(NULL, &cfg, false, a, b, &path) != EE_STATUS_NULL_POINTER) return 14;
    printf("%s\n", ee_last_error_message());
    ee_esdf_free(esdf);
    return 0;
}
"#;

fn cc() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| cc)
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let Some(cc) = cc() else {
        eprintln!("skipping: no C compiler");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, SMOKE).unwrap();
    let include = header().parent().unwrap().to_path_buf();
    for extra in [&["-std=c99"][..], &["-x", "c++"][..]] {
        let out = Command::new(&cc)
            .args(["-fsyntax-only", "-Wall", "-Werror"])
            .args(extra)
            .arg("-I")
            .arg(&include)
            .arg(&src)
            .output()
            .unwrap();
        assert!(out.status.success(), "{extra:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

/// Static library built next to this test binary, if cargo produced one.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    Some(profile_dir.join("libesdf_explore_ffi.a")).filter(|p| p.exists())
}

#[test]
fn c_program_links_and_runs() {
    let (Some(cc), Some(lib)) = (cc(), static_lib()) else {
        eprintln!("skipping: no C compiler or static library");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let exe = dir.path().join("smoke");
    std::fs::write(&src, SMOKE).unwrap();
    let out = Command::new(&cc)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let stdout = String::from_utf8(run.stdout).unwrap();
    let mut lines = stdout.lines();
    let first: Vec<&str> = lines.next().unwrap().split(' ').collect();
    assert_eq!(first[0], "14", "{stdout}");
    assert_eq!(lines.next(), Some("esdf is null"));
}
