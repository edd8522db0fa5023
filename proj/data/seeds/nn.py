"""Nearest neighbor: start at city 0, always move to the closest unvisited city."""
import math


def _dist(a, b):
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return math.sqrt(dx * dx + dy * dy)


def solve(coords):
    n = len(coords)
    visited = [False] * n
    current = 0
    visited[current] = True
    tour = [current]
    for _ in range(1, n):
        best = -1
        best_d = math.inf
        for c in range(n):
            if not visited[c]:
                d = _dist(coords[current], coords[c])
                if d < best_d:
                    best_d = d
                    best = c
        visited[best] = True
        tour.append(best)
        current = best
    return tour
