"""Bookkeeping for the acceptance criteria: one PASS/FAIL line each."""

from __future__ import annotations

import functools
import time

RESULTS: dict[int, str] = {}


def criterion(number: int, title: str):
    def wrap(test):
        @functools.wraps(test)
        def run(*args, **kwargs):
            start = time.perf_counter()
            try:
                detail = test(*args, **kwargs)
            except BaseException as exc:
                line = f"[criterion {number}] FAIL {title}: {type(exc).__name__}: {exc}"
                RESULTS[number] = line.splitlines()[0]
                print(RESULTS[number])
                raise
            elapsed = time.perf_counter() - start
            extra = f" ({detail})" if detail else ""
            RESULTS[number] = f"[criterion {number}] PASS {title}{extra} [{elapsed:.1f}s]"
            print(RESULTS[number])

        return run

    return wrap
