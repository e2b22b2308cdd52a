#!/usr/bin/env python3
"""Regenerates the bundled ASCII worlds.

Each world is carved out of solid rock: free space is the union of thick
line segments ("capsules") and axis-aligned rectangles, everything else is
occupied, and the outermost ring of cells is always occupied.
"""
import math
import os

RES = 0.1


class Canvas:
    def __init__(self, width_m, height_m):
        self.w = int(round(width_m / RES))
        self.h = int(round(height_m / RES))
        self.free = [[False] * self.w for _ in range(self.h)]
        self.start = None
        self.yaw = 0.0

    def center(self, row, col):
        return ((col + 0.5) * RES, (row + 0.5) * RES)

    def rect(self, x0, y0, x1, y1, free=True):
        for row in range(self.h):
            for col in range(self.w):
                x, y = self.center(row, col)
                if x0 <= x <= x1 and y0 <= y <= y1:
                    self.free[row][col] = free

    def capsule(self, p, q, width):
        half = width / 2.0
        (px, py), (qx, qy) = p, q
        dx, dy = qx - px, qy - py
        ll = dx * dx + dy * dy
        xmin, xmax = min(px, qx) - half, max(px, qx) + half
        ymin, ymax = min(py, qy) - half, max(py, qy) + half
        for row in range(max(0, int(ymin / RES) - 1), min(self.h, int(ymax / RES) + 2)):
            for col in range(max(0, int(xmin / RES) - 1), min(self.w, int(xmax / RES) + 2)):
                x, y = self.center(row, col)
                t = 0.0 if ll == 0 else max(0.0, min(1.0, ((x - px) * dx + (y - py) * dy) / ll))
                cx, cy = px + t * dx, py + t * dy
                if (x - cx) ** 2 + (y - cy) ** 2 <= half * half:
                    self.free[row][col] = True

    def polyline(self, pts, width):
        for a, b in zip(pts, pts[1:]):
            self.capsule(a, b, width)

    def set_start(self, x, y, yaw_deg=0.0):
        self.start = (int(y / RES), int(x / RES))
        self.yaw = yaw_deg

    def write(self, path, description):
        for row in range(self.h):
            for col in range(self.w):
                if row in (0, self.h - 1) or col in (0, self.w - 1):
                    self.free[row][col] = False
        sr, sc = self.start
        assert self.free[sr][sc], f"start blocked in {path}"
        with open(path, "w") as f:
            f.write(f"; {description}\n")
            f.write(f"; resolution = {RES}\n")
            f.write(f"; start_yaw_deg = {self.yaw}\n")
            # Top line is the highest row (north).
            for row in reversed(range(self.h)):
                line = []
                for col in range(self.w):
                    if (row, col) == (sr, sc):
                        line.append("S")
                    else:
                        line.append("." if self.free[row][col] else "#")
                f.write("".join(line) + "\n")


def arc(cx, cy, r, a0, a1, n):
    return [(cx + r * math.cos(a0 + (a1 - a0) * i / n), cy + r * math.sin(a0 + (a1 - a0) * i / n)) for i in range(n + 1)]


def corridor():
    c = Canvas(44.4, 3.0)
    c.rect(0.2, 0.4, 44.2, 2.6)
    c.set_start(1.25, 1.55)
    return c, "straight corridor, 44 m x 2.2 m, closed at both ends"


def dead_end():
    c = Canvas(24.4, 6.0)
    c.rect(0.2, 0.5, 6.0, 5.5)
    c.rect(6.0, 1.8, 24.2, 4.2)
    c.set_start(1.55, 3.05)
    return c, "entrance bay opening into a 2.4 m wide dead-end passage"


def junction():
    c = Canvas(34.4, 34.4)
    c.rect(0.2, 15.9, 34.2, 18.5)
    c.rect(15.9, 0.2, 18.5, 34.2)
    c.set_start(1.25, 17.25)
    return c, "four-way junction of two 2.6 m wide corridors"


def pillars():
    c = Canvas(33.4, 21.4)
    c.rect(0.2, 0.2, 33.2, 21.2)
    for i in range(5):
        for j in range(3):
            x0 = 3.2 + 6.0 * i
            y0 = 3.2 + 6.0 * j
            c.rect(x0, y0, x0 + 3.0, y0 + 3.0, free=False)
    c.set_start(1.65, 10.65)
    return c, "room-and-pillar field, 3 m pillars on a 6 m pitch"


def tunnel_fork():
    width = 3.0
    start = (3.0, 4.0)
    # Curved approach: quarter arc turning left from east towards north-east.
    main = arc(3.0, 34.0, 30.0, -math.pi / 2, -math.pi / 2 + math.radians(30), 12)
    fork = (main[-1][0] + 8.0 * math.cos(math.radians(30)), main[-1][1] + 8.0 * math.sin(math.radians(30)))
    left_dir = math.radians(60)
    left_a = (fork[0] + 20.0 * math.cos(left_dir), fork[1] + 20.0 * math.sin(left_dir))
    # Right-hand bend from 60 degrees back to 30 degrees.
    bend = arc(left_a[0] + 12.0 * math.cos(math.radians(-30)), left_a[1] + 12.0 * math.sin(math.radians(-30)),
               12.0, math.radians(150), math.radians(120), 8)
    tail_dir = math.radians(30)
    tail = (bend[-1][0] + 70.0 * math.cos(tail_dir), bend[-1][1] + 70.0 * math.sin(tail_dir))
    right_dir = 0.0
    right_end = (fork[0] + 7.0 * math.cos(right_dir), fork[1] + 7.0 * math.sin(right_dir))

    pts = [start] + main
    xs = [p[0] for p in pts + [fork, left_a, tail, right_end] + bend]
    ys = [p[1] for p in pts + [fork, left_a, tail, right_end] + bend]
    margin = 3.0
    ox, oy = min(xs) - margin, min(ys) - margin
    c = Canvas(max(xs) - ox + margin, max(ys) - oy + margin)

    def sh(p):
        return (p[0] - ox, p[1] - oy)

    c.polyline([sh(p) for p in pts + [fork]], width)
    c.polyline([sh(fork), sh(left_a)] + [sh(p) for p in bend] + [sh(tail)], width)
    c.capsule(sh(fork), sh(right_end), width)
    sx, sy = sh(start)
    c.set_start(sx + 0.05, sy + 0.05)
    return c, "curved tunnel with a fork; the right branch is blocked after 7 m, the left runs on for ~96 m"


if __name__ == "__main__":
    here = os.path.dirname(os.path.abspath(__file__))
    for fn in (corridor, dead_end, junction, pillars, tunnel_fork):
        canvas, desc = fn()
        canvas.write(os.path.join(here, fn.__name__ + ".txt"), desc)
        print(fn.__name__, canvas.w, "x", canvas.h)
