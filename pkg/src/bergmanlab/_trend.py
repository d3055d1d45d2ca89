"""Grid-based verdicts for boundedness, vanishing and convergence.

The theorems are statements about limits as |z| -> 1; these helpers turn
finite grids into three-valued verdicts.  Thresholds are fixed here so every
caller uses the same rules.
"""
import numpy as np

EXTENSION_FACTOR = 1.25   # max over extended grid may exceed base max by this
VANISH_FACTOR = 0.05      # last ring must fall below this fraction of the first
CONVERGING_RATIO = 0.8    # geometric decay of increments => converging
DIVERGING_RATIO = 0.95    # non-decaying increments => diverging


def log_bounded(base, extended, factor=EXTENSION_FACTOR):
    """True when the max of log-values does not grow under grid extension."""
    base = np.asarray(base, float)
    extended = np.asarray(extended, float)
    if not (np.all(np.isfinite(base)) and np.all(np.isfinite(extended))):
        return False
    return bool(extended.max() <= base.max() + np.log(factor))


def bounded(base, extended, factor=EXTENSION_FACTOR):
    base = np.asarray(base, float)
    extended = np.asarray(extended, float)
    if not (np.all(np.isfinite(base)) and np.all(np.isfinite(extended))):
        return False
    return bool(extended.max() <= factor * base.max())


def bounded_below(base, extended, factor=EXTENSION_FACTOR):
    base = np.asarray(base, float)
    extended = np.asarray(extended, float)
    if base.min() <= 0:
        return False
    return bool(extended.min() * factor >= base.min())


def ring_verdict(values, vanish_factor=VANISH_FACTOR):
    """Verdict for a profile sampled on rings approaching the boundary.

    Returns ``"vanishing"`` when the last three values decrease monotonically
    and the last one is below ``vanish_factor`` times the first, ``"bounded"``
    when the last value does not exceed twice the first, else ``"growing"``.
    """
    v = np.asarray(values, float)
    if not np.all(np.isfinite(v)):
        return "growing"
    first, last = v[0], v[-1]
    if first <= 0 and last <= 0:
        return "vanishing"
    tail = v[-3:]
    if np.all(np.diff(tail) <= 0) and last <= vanish_factor * first:
        return "vanishing"
    if last <= 2.0 * max(first, np.max(v[:-1])):
        return "bounded"
    return "growing"


def series_verdict(increments, converging=CONVERGING_RATIO, diverging=DIVERGING_RATIO,
                   window=4):
    """Convergence verdict from the last ``window`` increments of a positive series.

    The mean ratio of successive increments decides: below ``converging``
    the tail is geometric, above ``diverging`` it does not decay.
    """
    inc = np.asarray(increments, float)[-window:]
    if inc.size == 0 or np.all(inc == 0):
        return "converging"
    if inc[-1] == 0:
        return "converging"
    if np.any(inc[:-1] <= 0):
        return "inconclusive"
    ratio = float(np.exp(np.mean(np.diff(np.log(inc)))))
    if ratio <= converging:
        return "converging"
    if ratio >= diverging:
        return "diverging"
    return "inconclusive"


def tristate(flag):
    """Map a verdict to the summary vocabulary {true, false, inconclusive}."""
    if flag is None:
        return "inconclusive"
    return "true" if flag else "false"
