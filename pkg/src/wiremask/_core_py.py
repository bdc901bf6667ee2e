"""Pure numpy implementation of the evaluation kernels.

This is the fallback used when the compiled ``_core`` extension is missing.
Both implementations perform the same floating-point operations in the same
order, so they return bit-identical results.

Array conventions: grid fields are indexed ``[i, j]`` with ``i`` along x.
Anchor ties left after the distance criterion go to the smallest ``(j, i)``.
"""

import numpy as np


def free_field(bitmap, fw, fh):
    """1 where a ``fw x fh`` footprint anchored at ``(i, j)`` fits on free cells."""
    m = bitmap.shape[0]
    out = np.zeros((m, m), dtype=np.uint8)
    if fw > m or fh > m:
        return out
    s = np.zeros((m + 1, m + 1), dtype=np.int64)
    np.cumsum(np.cumsum(bitmap, axis=0, dtype=np.int64), axis=1, out=s[1:, 1:])
    ni, nj = m - fw + 1, m - fh + 1
    win = s[fw:fw + ni, fh:fh + nj] - s[:ni, fh:fh + nj] - s[fw:fw + ni, :nj] + s[:ni, :nj]
    out[:ni, :nj] = win == 0
    return out


def exact_free_field(xs, ys, w, h, x0, y0, x1, y1, tol):
    """1 where a ``w x h`` rectangle at ``(xs[i], ys[j])`` meets no given rectangle
    with positive area."""
    m = xs.shape[0]
    out = np.ones((m, m), dtype=np.uint8)
    if len(x0) == 0:
        return out
    ilo = np.searchsorted(xs + w, x0 + tol, side="right")
    ihi = np.searchsorted(xs, x1 - tol, side="left")
    jlo = np.searchsorted(ys + h, y0 + tol, side="right")
    jhi = np.searchsorted(ys, y1 - tol, side="left")
    keep = (ilo < ihi) & (jlo < jhi)
    ilo, ihi, jlo, jhi = ilo[keep], ihi[keep], jlo[keep], jhi[keep]
    diff = np.zeros((m + 1, m + 1), dtype=np.int64)
    np.add.at(diff, (ilo, jlo), 1)
    np.add.at(diff, (ihi, jlo), -1)
    np.add.at(diff, (ilo, jhi), -1)
    np.add.at(diff, (ihi, jhi), 1)
    blocked = np.cumsum(np.cumsum(diff, axis=0), axis=1)[:m, :m]
    out[blocked > 0] = 0
    return out


def axis_cost(lo, hi, has, omin, omax, coords):
    """Summed bounding-box growth along one axis, for every candidate coordinate.

    Net ``t`` currently spans ``[lo[t], hi[t]]`` (or nothing if ``has[t]`` is 0)
    and receives pins at ``coords + omin[t] .. coords + omax[t]``.
    """
    n = len(lo)
    if n == 0:
        return np.zeros(len(coords))
    lo = np.asarray(lo, dtype=np.float64)[:, None]
    hi = np.asarray(hi, dtype=np.float64)[:, None]
    omin = np.asarray(omin, dtype=np.float64)[:, None]
    omax = np.asarray(omax, dtype=np.float64)[:, None]
    c = np.asarray(coords, dtype=np.float64)[None, :]
    grown = np.maximum(hi, c + omax) - np.minimum(lo, c + omin) - (hi - lo)
    own = np.broadcast_to(omax - omin, grown.shape)
    cost = np.where(np.asarray(has, dtype=bool)[:, None], grown, own)
    # sequential accumulation keeps the summation order of the compiled kernel
    return np.cumsum(cost, axis=0)[-1].copy()


def pick_anchor(dx, dy, valid, dx2, dy2, delta_tol):
    """Least-increment anchor closest to the genotype; ``None`` if nothing is valid."""
    if not valid.any():
        return None
    delta = dx[:, None] + dy[None, :]
    dmin = np.min(delta[valid])
    q = valid & (delta <= dmin + delta_tol)
    dist = np.where(q, dx2[:, None] + dy2[None, :], np.inf)
    j, i = divmod(int(np.argmin(dist.T)), len(dx))
    return i, j


def greedy_place(order, gx, gy, mw, mh, fw, fh, xs, ys, canvas_w, canvas_h,
                 mptr, mnet, oxmin, oxmax, oymin, oymax,
                 blx, bhx, bly, bhy, bhas, exact, geo_tol, delta_tol):
    """Wire-mask-guided greedy legalization of one genotype.

    Net boxes ``blx..bhas`` are updated in place. Returns ``(ai, aj, incr,
    n_placed)`` where ``ai/aj`` are per-macro anchors (-1 when unplaced) and
    ``incr`` the HPWL increment of each step in order.
    """
    k = len(order)
    m = len(xs)
    ai = np.full(k, -1, dtype=np.int64)
    aj = np.full(k, -1, dtype=np.int64)
    incr = np.zeros(k)
    bitmap = np.zeros((m, m), dtype=np.uint8)
    rx0, ry0, rx1, ry1 = np.empty(k), np.empty(k), np.empty(k), np.empty(k)

    for step in range(k):
        v = order[step]
        w, h = mw[v], mh[v]
        if exact:
            free = exact_free_field(xs, ys, w, h, rx0[:step], ry0[:step],
                                    rx1[:step], ry1[:step], geo_tol)
        else:
            free = free_field(bitmap, fw[v], fh[v])
        valid = ((free != 0) & (xs + w <= canvas_w + geo_tol)[:, None]
                 & (ys + h <= canvas_h + geo_tol)[None, :])

        s, e = mptr[v], mptr[v + 1]
        nets = mnet[s:e]
        dx = axis_cost(blx[nets], bhx[nets], bhas[nets], oxmin[s:e], oxmax[s:e], xs)
        dy = axis_cost(bly[nets], bhy[nets], bhas[nets], oymin[s:e], oymax[s:e], ys)
        ddx = xs - gx[v]
        ddy = ys - gy[v]
        pick = pick_anchor(dx, dy, valid, ddx * ddx, ddy * ddy, delta_tol)
        if pick is None:
            return ai, aj, incr, step
        i, j = pick
        ai[v], aj[v] = i, j
        incr[step] = dx[i] + dy[j]

        x, y = xs[i], ys[j]
        for t in range(s, e):
            n = mnet[t]
            px0, px1 = x + oxmin[t], x + oxmax[t]
            py0, py1 = y + oymin[t], y + oymax[t]
            if bhas[n]:
                blx[n] = min(blx[n], px0)
                bhx[n] = max(bhx[n], px1)
                bly[n] = min(bly[n], py0)
                bhy[n] = max(bhy[n], py1)
            else:
                blx[n], bhx[n], bly[n], bhy[n] = px0, px1, py0, py1
                bhas[n] = 1
        bitmap[i:i + fw[v], j:j + fh[v]] = 1
        rx0[step], ry0[step], rx1[step], ry1[step] = x, y, x + w, y + h
    return ai, aj, incr, k
