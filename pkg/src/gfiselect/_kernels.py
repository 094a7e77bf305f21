"""Compiled inner loops for the cardinality-constrained L0 minimizer.

All routines work in coefficient space. For a target ``t`` and design ``X``
with ``G = X'X``, the objective ``1/2 ||X'(t - Xb)||^2`` is written with
``c = X't`` as ``1/2 ||c - G b||^2``; its gradient is ``G2 b - Gc`` where
``G2 = G G`` and ``Gc = G c``. Iterates are kept sparse through an explicit
support array so each step costs O(p * kappa).
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _objective(G, c, b, supp):
    p = c.shape[0]
    acc = 0.0
    for i in range(p):
        r = c[i]
        for s in supp:
            r -= G[i, s] * b[s]
        acc += r * r
    return 0.5 * acc


@njit(cache=True)
def _top_kappa(z, kappa):
    # Stable sort on -|z| keeps the lowest index among equal magnitudes.
    order = np.argsort(-np.abs(z), kind="mergesort")
    return np.sort(order[:kappa])


@njit(cache=True)
def _polish(G2, Gc, supp):
    k = supp.shape[0]
    A = np.empty((k, k))
    rhs = np.empty(k)
    for a in range(k):
        rhs[a] = Gc[supp[a]]
        for b in range(k):
            A[a, b] = G2[supp[a], supp[b]]
    sol = np.linalg.lstsq(A, rhs, rcond=1e-13)[0]
    return sol


@njit(cache=True)
def iht(G, G2, c, Gc, kappa, b0, lip, max_iters, rel_tol, eps, polish, history):
    """Iterative hard thresholding with support-wise least-squares polishing.

    ``b0`` is thresholded to ``kappa`` entries on entry. ``history`` receives the
    objective after every accepted iterate and polish
    (length >= 2 * max_iters + 3).

    Returns ``(objective, iterations, early_exit, b, n_history)``.
    """
    p = c.shape[0]
    b = np.zeros(p)
    if kappa == 0:
        obj = 0.5 * np.dot(c, c)
        history[0] = obj
        return obj, 0, obj < eps, b, 1

    supp = _top_kappa(b0, kappa)
    for s in supp:
        b[s] = b0[s]
    obj = _objective(G, c, b, supp)
    nh = 0
    history[nh] = obj
    nh += 1
    if obj < eps:
        return obj, 0, True, b, nh

    step = 1.0 / lip
    polished = False
    it = 0
    z = np.empty(p)
    while it < max_iters:
        it += 1
        for i in range(p):
            g = -Gc[i]
            for s in supp:
                g += G2[i, s] * b[s]
            z[i] = b[i] - step * g
        new_supp = _top_kappa(z, kappa)
        same = True
        for a in range(kappa):
            if new_supp[a] != supp[a]:
                same = False
                break
        if same and polished:
            # Least-squares point on this support is a fixed point of the map.
            break
        b_new = np.zeros(p)
        for s in new_supp:
            b_new[s] = z[s]
        obj_new = _objective(G, c, b_new, new_supp)
        prev = obj
        b = b_new
        supp = new_supp
        obj = obj_new
        history[nh] = obj
        nh += 1
        if not same:
            polished = False
        if obj < eps:
            return obj, it, True, b, nh
        if polish and same and not polished:
            polished = True
            sol = _polish(G2, Gc, supp)
            b_pol = np.zeros(p)
            for a in range(kappa):
                b_pol[supp[a]] = sol[a]
            obj_pol = _objective(G, c, b_pol, supp)
            if obj_pol <= obj:
                b = b_pol
                obj = obj_pol
                history[nh] = obj
                nh += 1
            if obj < eps:
                return obj, it, True, b, nh
            continue
        if prev <= 0.0 or abs(prev - obj) < rel_tol * prev:
            break

    if polish and not polished:
        sol = _polish(G2, Gc, supp)
        b_pol = np.zeros(p)
        for a in range(kappa):
            b_pol[supp[a]] = sol[a]
        obj_pol = _objective(G, c, b_pol, supp)
        if obj_pol <= obj:
            b = b_pol
            obj = obj_pol
            history[nh] = obj
            nh += 1
    return obj, it, False, b, nh


@njit(cache=True)
def admissibility_batch(G, G2, model, draws, lip, max_iters, rel_tol, eps, polish, multi_start):
    """Run the L0 minimizer for every row of ``draws`` (coefficients on ``model``).

    The first warm start is the draw embedded in p dimensions with its
    smallest-magnitude entry zeroed. With ``multi_start`` the remaining
    leave-one-out starts follow in order of increasing magnitude of the dropped
    entry, stopping as soon as one run gets below ``eps``; the smallest
    achieved objective is reported.

    Returns ``(objectives, iterations, early_exit)`` arrays.
    """
    n_draws, k = draws.shape
    p = G.shape[0]
    kappa = k - 1
    objs = np.empty(n_draws)
    iters = np.empty(n_draws, dtype=np.int64)
    early = np.empty(n_draws, dtype=np.bool_)
    history = np.empty(2 * max_iters + 3)
    c = np.empty(p)
    Gc = np.empty(p)
    b0 = np.zeros(p)
    n_starts = k if (multi_start and kappa > 0) else 1
    for r in range(n_draws):
        beta = draws[r]
        for i in range(p):
            acc = 0.0
            acc2 = 0.0
            for a in range(k):
                acc += G[i, model[a]] * beta[a]
                acc2 += G2[i, model[a]] * beta[a]
            c[i] = acc
            Gc[i] = acc2
        order = np.argsort(np.abs(beta), kind="mergesort")
        best = np.inf
        total_it = 0
        hit = False
        for s in range(n_starts):
            b0[:] = 0.0
            for a in range(k):
                if a != order[s]:
                    b0[model[a]] = beta[a]
            obj, it, ex, _, _ = iht(G, G2, c, Gc, kappa, b0, lip, max_iters, rel_tol, eps, polish, history)
            total_it += it
            if obj < best:
                best = obj
            if ex:
                hit = True
                break
        objs[r] = best
        iters[r] = total_it
        early[r] = hit
    return objs, iters, early


@njit(cache=True)
def elastic_net_path(gram, xty, n, lambdas, alpha, max_sweeps, tol):
    """Cyclic coordinate descent for (1/2n)||y - Xb||^2 + lam*(alpha|b|_1 + (1-alpha)/2 |b|^2).

    Covariance-update form: works from ``gram = X'X`` and ``xty = X'y``.
    Warm-starts each lambda from the previous solution. Returns a
    ``(len(lambdas), p)`` coefficient array.
    """
    p = xty.shape[0]
    out = np.zeros((lambdas.shape[0], p))
    b = np.zeros(p)
    grad = xty.copy()  # X'y - X'X b
    for li in range(lambdas.shape[0]):
        lam = lambdas[li]
        l1 = lam * alpha * n
        l2 = lam * (1.0 - alpha) * n
        for _ in range(max_sweeps):
            max_delta = 0.0
            max_b = 0.0
            for j in range(p):
                old = b[j]
                rho = grad[j] + gram[j, j] * old
                if rho > l1:
                    new = (rho - l1) / (gram[j, j] + l2)
                elif rho < -l1:
                    new = (rho + l1) / (gram[j, j] + l2)
                else:
                    new = 0.0
                delta = new - old
                if delta != 0.0:
                    for i in range(p):
                        grad[i] -= gram[i, j] * delta
                    b[j] = new
                    if abs(delta) > max_delta:
                        max_delta = abs(delta)
                if abs(new) > max_b:
                    max_b = abs(new)
            if max_delta <= tol * max(max_b, 1e-300) or max_delta == 0.0:
                break
        out[li] = b
    return out
