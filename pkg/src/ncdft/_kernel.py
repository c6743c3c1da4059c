"""Hot loop of the integer engine, compiled with numba.

The update for one bin and one new sample folds the add and subtract
halves together.  The expiring sample's reference value is the entry at
the *current* phase index times +1 or -1: the subtract index trails the
add index by window_len * M' table steps, which is a whole number of
half-turns, and the tables are built with exact half-turn antisymmetry.
That lets each step do two gathers per side instead of four while
keeping the cancellation bit-exact.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def accumulate(chunk, ring, cap, t0, win_len, two_n, base, m_left, m_right,
               q_left, q_right, sigma, acc, tab_cos, tab_sin):
    """Advance every bin's four accumulators across one chunk.

    chunk holds the new samples (already pushed into ring); t0 is the
    stream position of chunk[0]. q_left/q_right are updated in place to
    the phase indices at t0 + len(chunk).
    """
    n_new = chunk.shape[0]
    n_bins = win_len.shape[0]
    for b in range(n_bins):
        n = win_len[b]
        tn = two_n[b]
        bs = base[b]
        ml = m_left[b]
        mr = m_right[b]
        sg = sigma[b]
        ql = q_left[b]
        qr = q_right[b]
        idx = (t0 - n) % cap  # ring slot of the sample about to expire
        re_l = np.int64(0)
        im_l = np.int64(0)
        re_r = np.int64(0)
        im_r = np.int64(0)
        for t in range(n_new):
            d = np.int64(chunk[t]) - sg * np.int64(ring[idx])
            re_l += d * tab_cos[bs + ql]
            im_l += d * tab_sin[bs + ql]
            re_r += d * tab_cos[bs + qr]
            im_r += d * tab_sin[bs + qr]
            idx += 1
            if idx == cap:
                idx = 0
            ql += ml
            if ql >= tn:
                ql -= tn
            qr += mr
            if qr >= tn:
                qr -= tn
        acc[b, 0] += re_l
        acc[b, 1] += im_l
        acc[b, 2] += re_r
        acc[b, 3] += im_r
        q_left[b] = ql
        q_right[b] = qr
