"""Farthest insertion: repeatedly add the unvisited city farthest from the tour,
placed where it increases the tour length the least."""
import math


def _dist(a, b):
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return math.sqrt(dx * dx + dy * dy)


def _cheapest_position(coords, tour, city):
    at = 1
    best_cost = math.inf
    m = len(tour)
    for k in range(m):
        u = tour[k]
        v = tour[(k + 1) % m]
        cost = _dist(coords[u], coords[city]) + _dist(coords[city], coords[v]) - _dist(coords[u], coords[v])
        if cost < best_cost:
            best_cost = cost
            at = k + 1
    return at


def solve(coords):
    n = len(coords)
    a, b = 0, 1
    best = _dist(coords[0], coords[1])
    for i in range(n):
        for j in range(i + 1, n):
            d = _dist(coords[i], coords[j])
            if d > best:
                best = d
                a, b = i, j
    tour = [a, b]
    in_tour = [False] * n
    in_tour[a] = in_tour[b] = True
    to_tour = [min(_dist(coords[c], coords[a]), _dist(coords[c], coords[b])) for c in range(n)]
    while len(tour) < n:
        city = -1
        best = -1.0
        for c in range(n):
            if not in_tour[c] and to_tour[c] > best:
                best = to_tour[c]
                city = c
        tour.insert(_cheapest_position(coords, tour, city), city)
        in_tour[city] = True
        for c in range(n):
            to_tour[c] = min(to_tour[c], _dist(coords[c], coords[city]))
    return tour
