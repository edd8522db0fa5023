"""Random insertion: repeatedly add a randomly chosen unvisited city,
placed where it increases the tour length the least. Picks come from a
SplitMix64 generator with a fixed seed, so runs are reproducible."""
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


PICK_SEED = 12345
_MASK = (1 << 64) - 1


class _SplitMix64:
    def __init__(self, seed):
        self.state = seed & _MASK

    def next(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def index(self, n):
        return self.next() % n


def solve(coords):
    n = len(coords)
    picks = _SplitMix64(PICK_SEED)
    a = picks.index(n)
    b = picks.index(n - 1)
    if b >= a:
        b += 1
    tour = [a, b]
    in_tour = [False] * n
    in_tour[a] = in_tour[b] = True
    while len(tour) < n:
        k = picks.index(n - len(tour))
        city = -1
        for c in range(n):
            if in_tour[c]:
                continue
            if k == 0:
                city = c
                break
            k -= 1
        tour.insert(_cheapest_position(coords, tour, city), city)
        in_tour[city] = True
    return tour
