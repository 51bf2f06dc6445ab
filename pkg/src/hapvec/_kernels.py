"""Hot loops of the discrete-event oracle.

Two interchangeable implementations of one FCFS M/D/c run:

* ``mdc_event_loop`` -- explicit future-event list (next arrival vs. head of
  the departure FIFO; with constant service, departures are scheduled in
  non-decreasing time order so a FIFO is a valid priority queue). Compiled
  with numba when available.
* ``mdc_vectorized`` -- pure numpy. With constant service and FCFS, frame n
  starts at max(A_n, S_{n-c} + D); along each residue class n mod c this is
  a Lindley recursion solved by a cumulative maximum.

Both return (waits, seen, area_queue, area_system): per-frame waiting time,
number in system found by each arrival (an arrival tied with a departure
is processed first), and the integrals of queue / system occupancy over the
window [t_lo, t_hi].
"""

from __future__ import annotations

import numpy as np

from ._numba import HAVE_NUMBA, njit

BACKENDS = ("numba", "numpy", "python")


def _mdc_event_loop_py(arrivals, service, servers, t_lo, t_hi):
    n = arrivals.size
    waits = np.zeros(n)
    seen = np.zeros(n, dtype=np.int64)
    dep = np.empty(n)
    dep_head = 0
    dep_tail = 0
    waiting = np.empty(n, dtype=np.int64)
    q_head = 0
    q_tail = 0
    busy = 0
    in_system = 0
    area_q = 0.0
    area_sys = 0.0
    t_prev = 0.0
    i = 0
    while i < n or dep_head < dep_tail:
        arrival_next = i < n and (dep_head == dep_tail or arrivals[i] <= dep[dep_head])
        t = arrivals[i] if arrival_next else dep[dep_head]

        lo = max(t_prev, t_lo)
        hi = min(t, t_hi)
        if hi > lo:
            area_q += (q_tail - q_head) * (hi - lo)
            area_sys += in_system * (hi - lo)
        t_prev = t

        if arrival_next:
            seen[i] = in_system
            in_system += 1
            if busy < servers:
                busy += 1
                dep[dep_tail] = t + service
                dep_tail += 1
            else:
                waiting[q_tail] = i
                q_tail += 1
            i += 1
        else:
            dep_head += 1
            busy -= 1
            in_system -= 1
            if q_head < q_tail:
                j = waiting[q_head]
                q_head += 1
                waits[j] = t - arrivals[j]
                busy += 1
                dep[dep_tail] = t + service
                dep_tail += 1

        if q_head < q_tail and busy < servers:
            raise AssertionError("work conservation violated: idle server with non-empty queue")
    return waits, seen, area_q, area_sys


mdc_event_loop = njit(cache=True)(_mdc_event_loop_py)


def _overlap(a, b, lo, hi):
    return np.clip(np.minimum(b, hi) - np.maximum(a, lo), 0.0, None).sum()


def mdc_vectorized(arrivals, service, servers, t_lo, t_hi):
    n = arrivals.size
    rows = -(-n // servers)
    padded = np.full(rows * servers, np.inf)
    padded[:n] = arrivals
    shift = (np.arange(rows) * service)[:, None]
    starts = np.maximum.accumulate(padded.reshape(rows, servers) - shift, axis=0) + shift
    starts = starts.reshape(-1)[:n]
    waits = starts - arrivals
    finishes = starts + service
    seen = np.arange(n, dtype=np.int64) - np.searchsorted(finishes, arrivals, side="left")
    area_q = _overlap(arrivals, starts, t_lo, t_hi)
    area_sys = _overlap(arrivals, finishes, t_lo, t_hi)
    return waits, seen, float(area_q), float(area_sys)


def default_backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


def run_mdc(arrivals, service, servers, t_lo=0.0, t_hi=np.inf, backend=None):
    """Dispatch one FCFS M/D/c run to the selected implementation."""
    backend = backend or default_backend()
    arrivals = np.ascontiguousarray(arrivals, dtype=np.float64)
    args = (arrivals, float(service), int(servers), float(t_lo), float(t_hi))
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is disabled or missing")
        return mdc_event_loop(*args)
    if backend == "numpy":
        return mdc_vectorized(*args)
    if backend == "python":
        return _mdc_event_loop_py(*args)
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
