"""Exhaustive error-distance statistics for partially approximated adders.

For an n-bit configuration every pair (a, b) in [0, 2^n)^2 is enumerated with
carry-in 0 and compared against the exact sum.  The headline figures:

* MED: mean of |approx - exact| over all pairs,
* NMED: MED normalized by the maximum exact output 2*(2^n - 1),
* MRED: mean of |approx - exact| / (a + b) over the pairs with a + b > 0
  (relative error is undefined at zero; exactly one pair is excluded),
* error rate: fraction of pairs with a nonzero error distance.
"""

import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import RangeError, ResourceLimitError
from .rca import RcaConfig, rca_add, ripple_bits

#: enumerating 2^(2n) pairs beyond this width is rejected
MAX_EXHAUSTIVE_WIDTH = 12


@dataclass(frozen=True)
class ErrorReport:
    config: RcaConfig
    med: float
    nmed: float
    mred: float
    max_ed: int
    error_rate: float
    ed_histogram: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "kind": str(self.config.kind),
            "n": self.config.n,
            "k": self.config.k,
            "med": self.med,
            "nmed": self.nmed,
            "mred": self.mred,
            "max_ed": self.max_ed,
            "error_rate": self.error_rate,
            "ed_histogram": {str(ed): count for ed, count in self.ed_histogram.items()},
        }


def ed(cfg: RcaConfig, a: int, b: int) -> int:
    """Error distance |approximate sum - exact sum| of a single addition."""
    return abs(rca_add(cfg, a, b, 0).value - (a + b))


def _chunk_stats(cfg: RcaConfig, a_lo: int, a_hi: int):
    """Stats over the block a in [a_lo, a_hi) x b in [0, 2^n)."""
    size = 1 << cfg.n
    a = np.repeat(np.arange(a_lo, a_hi, dtype=np.int64), size)
    b = np.tile(np.arange(size, dtype=np.int64), a_hi - a_lo)
    approx = ripple_bits(cfg, a, b, 0)
    exact = a + b
    errors = np.abs(approx - exact)
    nonzero = exact > 0
    hist = np.bincount(errors)
    return (
        int(errors.sum()),
        float((errors[nonzero] / exact[nonzero]).sum()),
        int(nonzero.size - nonzero.sum()),  # excluded pairs (exact sum 0)
        int((errors != 0).sum()),
        hist,
    )


def exhaustive_metrics(cfg: RcaConfig, threads: int = 1) -> ErrorReport:
    """Enumerate all 2^(2n) operand pairs with carry-in 0.

    The grid is split into row blocks whose partial histograms merge
    associatively, so blocks can be evaluated by a small thread pool.
    """
    if cfg.n > MAX_EXHAUSTIVE_WIDTH:
        raise ResourceLimitError(
            f"exhaustive enumeration is limited to n <= {MAX_EXHAUSTIVE_WIDTH}, got n={cfg.n}"
        )
    size = 1 << cfg.n
    # blocks of at most ~2^20 pairs keep peak memory flat at any width
    rows_per_block = max(1, (1 << 20) // size)
    blocks = [(lo, min(lo + rows_per_block, size)) for lo in range(0, size, rows_per_block)]

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda blk: _chunk_stats(cfg, *blk), blocks))
    else:
        results = [_chunk_stats(cfg, *blk) for blk in blocks]

    total_pairs = size * size
    ed_sum = sum(r[0] for r in results)
    red_sum = sum(r[1] for r in results)
    excluded = sum(r[2] for r in results)
    nonzero_eds = sum(r[3] for r in results)
    hist_len = max(len(r[4]) for r in results)
    hist = np.zeros(hist_len, dtype=np.int64)
    for r in results:
        hist[: len(r[4])] += r[4]

    med = ed_sum / total_pairs
    return ErrorReport(
        config=cfg,
        med=med,
        nmed=med / (2 * (size - 1)),
        mred=red_sum / (total_pairs - excluded),
        max_ed=int(hist.nonzero()[0].max()) if nonzero_eds else 0,
        error_rate=nonzero_eds / total_pairs,
        ed_histogram={int(v): int(hist[v]) for v in hist.nonzero()[0]},
    )


CSV_HEADER = "kind,n,k,med,nmed,mred,max_ed,error_rate\n"


def report_csv(report: ErrorReport) -> str:
    cfg = report.config
    return CSV_HEADER + (
        f"{cfg.kind},{cfg.n},{cfg.k},{report.med:.4f},{report.nmed:.6f},"
        f"{report.mred:.6f},{report.max_ed},{report.error_rate:.6f}\n"
    )


def report_json(report: ErrorReport) -> str:
    return json.dumps(report.to_dict(), indent=2)


def reports_csv(reports: list[ErrorReport]) -> str:
    out = io.StringIO()
    out.write(CSV_HEADER)
    for report in reports:
        out.write(report_csv(report).split("\n", 1)[1])
    return out.getvalue()
