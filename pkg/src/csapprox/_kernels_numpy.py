"""Pure-numpy twins of the numba kernels.

Same function names and signatures as ``_kernels_numba``; selected by
``CSA_BACKEND=numpy`` (or automatically when numba is unavailable).
The eigensolver delegates to LAPACK via ``np.linalg.eigh`` and the
subgradient solver is vectorized across starts, so the fallback stays
usable, just slower on the enumeration-heavy oracles.
"""

import numpy as np

NAME = "numpy"

PHASE1 = 1500
TAIL_EPOCH = 100
TAIL_DECAY = 0.7
STEP_FLOOR = 1e-10


def eigh_herm(a):
    w, v = np.linalg.eigh(a)
    return w[::-1].copy(), v[:, ::-1].copy(), True


def project_simplex(v):
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.shape[0] + 1)
    mask = u > css / idx
    k = np.nonzero(mask)[0][-1]
    tau = css[k] / (k + 1)
    return np.maximum(v - tau, 0.0)


def _project_rows(V):
    n, m = V.shape
    U = -np.sort(-V, axis=1)
    css = np.cumsum(U, axis=1) - 1.0
    idx = np.arange(1, m + 1)
    mask = U > css / idx
    k = m - 1 - np.argmax(mask[:, ::-1], axis=1)
    tau = css[np.arange(n), k] / (k + 1)
    return np.maximum(V - tau[:, None], 0.0)


def _step_at(t, c0):
    if t <= PHASE1:
        return c0 / np.sqrt(t)
    k = (t - PHASE1 - 1) // TAIL_EPOCH + 1
    return (c0 / np.sqrt(PHASE1)) * TAIL_DECAY ** k


def solve_bloch_batch(R, b, starts, c0, max_iter):
    """Vectorized projected subgradient over targets x starts."""
    nb = R.shape[0]
    ns, m = starts.shape
    P = _project_rows(np.tile(starts, (nb, 1)))
    Rt = np.repeat(R, ns, axis=0)
    best_f = np.full(nb * ns, np.inf)
    best_p = P.copy()
    avg = np.zeros_like(P)
    iters = 0
    t = 0
    while t < max_iter:
        t += 1
        d = Rt - P @ b
        f = np.sqrt(np.einsum("ij,ij->i", d, d))
        upd = f < best_f
        best_f[upd] = f[upd]
        best_p[upd] = P[upd]
        live = f >= 1e-15
        if not live.any():
            iters = t
            break
        alpha = _step_at(t, c0)
        if t > PHASE1 and alpha < STEP_FLOOR:
            iters = t
            break
        g = np.zeros_like(P)
        dl = d[live] / f[live, None]
        g[live] = -(dl @ b.T)
        if t <= PHASE1:
            avg += P
        P = _project_rows(P - alpha * g)
        if t == PHASE1:
            Q = _project_rows(avg / PHASE1)
            dq = Rt - Q @ b
            fq = np.sqrt(np.einsum("ij,ij->i", dq, dq))
            upd = fq < best_f
            best_f[upd] = fq[upd]
            best_p[upd] = Q[upd]
        iters = t
    best_f = best_f.reshape(nb, ns)
    best_p = best_p.reshape(nb, ns, m)
    pick = np.argmin(best_f, axis=1)
    F = best_f[np.arange(nb), pick]
    P = best_p[np.arange(nb), pick]
    IT = np.full(nb, iters * ns, dtype=np.int64)
    return F, P, IT


def solve_bloch(r, b, starts, c0, max_iter):
    F, P, IT = solve_bloch_batch(r[None, :], b, starts, c0, max_iter)
    return F[0], P[0], IT[0]


def _tracenorm_sign(A, sign_tol):
    w, V = np.linalg.eigh(A)
    f = float(np.sum(np.abs(w)))
    sg = np.where(w > sign_tol, 1.0, np.where(w < -sign_tol, -1.0, 0.0))
    S = (V * sg) @ V.conj().T
    return f, S


def solve_general(Rho, N, starts, c0, max_iter):
    m = N.shape[0]
    best_f = np.inf
    best_p = np.zeros(m)
    total = 0
    for s in range(starts.shape[0]):
        p = project_simplex(starts[s])
        avg = np.zeros(m)
        t = 0
        while t < max_iter:
            t += 1
            A = Rho - np.tensordot(p, N, axes=1)
            f, S = _tracenorm_sign(A, 1e-12)
            if f < best_f:
                best_f = f
                best_p = p.copy()
            if f < 1e-15:
                break
            # g_i = -Re Tr[S N_i]
            g = -np.real(np.einsum("ba,iab->i", S, N))
            alpha = _step_at(t, c0)
            if t > PHASE1 and alpha < STEP_FLOOR:
                break
            if t <= PHASE1:
                avg += p
            p = project_simplex(p - alpha * g)
            if t == PHASE1:
                q = project_simplex(avg / PHASE1)
                Aq = Rho - np.tensordot(q, N, axes=1)
                fq = float(np.sum(np.abs(np.linalg.eigvalsh(Aq))))
                if fq < best_f:
                    best_f = fq
                    best_p = q.copy()
        total += t
    return best_f, best_p, total


def _bloch_objective(r, b, p):
    d = r - b.T @ p
    return float(np.sqrt(d @ d))


def pairwise_descent_bloch(r, b, w, f, step):
    m = b.shape[0]
    w = w.copy()
    improved = True
    guard = 0
    while improved and guard < 100000:
        improved = False
        for i in range(m):
            if w[i] < step - 1e-15:
                continue
            for j in range(m):
                if j == i:
                    continue
                w[i] -= step
                w[j] += step
                fn = _bloch_objective(r, b, w)
                if fn < f - 1e-15:
                    f = fn
                    improved = True
                    guard += 1
                    if w[i] < step - 1e-15:
                        break
                else:
                    w[i] += step
                    w[j] -= step
    return f, w


def oracle_bloch_pairs(r, u, res):
    npairs = u.shape[0]
    h = 1.0 / res
    best_f = np.inf
    best = np.zeros(3, dtype=np.int64)
    xs = np.arange(-res, res + 1)
    if npairs == 1:
        ok = (res - np.abs(xs)) % 2 == 0
        x = xs[ok]
        d = r[None, :] - h * x[:, None] * u[0][None, :]
        f = np.sqrt(np.einsum("ij,ij->i", d, d))
        i = int(np.argmin(f))
        return float(f[i]), np.array([x[i], 0, 0], dtype=np.int64)
    if npairs == 2:
        for x in xs:
            rem1 = res - abs(x)
            ys = np.arange(-rem1, rem1 + 1)
            ys = ys[(rem1 - np.abs(ys)) % 2 == 0]
            if ys.size == 0:
                continue
            d = (r[None, :] - h * x * u[0][None, :]
                 - h * ys[:, None] * u[1][None, :])
            f = np.sqrt(np.einsum("ij,ij->i", d, d))
            i = int(np.argmin(f))
            if f[i] < best_f:
                best_f = float(f[i])
                best = np.array([x, ys[i], 0], dtype=np.int64)
        return best_f, best
    for x in xs:
        rem1 = res - abs(x)
        px = r - h * x * u[0]
        if np.sqrt(px @ px) - rem1 * h >= best_f:
            continue
        ys = np.arange(-rem1, rem1 + 1)
        for y in ys:
            rem2 = rem1 - abs(y)
            zs = np.arange(-rem2, rem2 + 1)
            zs = zs[(rem2 - np.abs(zs)) % 2 == 0]
            if zs.size == 0:
                continue
            q = px - h * y * u[1]
            if np.sqrt(q @ q) - rem2 * h >= best_f:
                continue
            d = q[None, :] - h * zs[:, None] * u[2][None, :]
            f = np.sqrt(np.einsum("ij,ij->i", d, d))
            i = int(np.argmin(f))
            if f[i] < best_f:
                best_f = float(f[i])
                best = np.array([x, y, zs[i]], dtype=np.int64)
    return best_f, best


def oracle_bloch_generic(r, b, res, f0, w0):
    m = b.shape[0]
    h = 1.0 / res
    best_f = f0
    best_c = np.round(np.asarray(w0) * res).astype(np.int64)
    c = np.zeros(m, dtype=np.int64)
    rem = np.zeros(m, dtype=np.int64)
    pv = np.zeros((m, 3))
    pv[0] = r
    rem[0] = res
    j = 0
    c[0] = -1
    while True:
        c[j] += 1
        if c[j] > rem[j]:
            j -= 1
            if j < 0:
                break
            continue
        d = pv[j] - c[j] * h * b[j]
        rm = rem[j] - c[j]
        if j == m - 2:
            e = d - rm * h * b[m - 1]
            f = np.sqrt(e @ e)
            if f < best_f:
                best_f = f
                best_c[: m - 1] = c[: m - 1]
                best_c[m - 1] = rm
        else:
            if np.sqrt(d @ d) - rm * h >= best_f:
                continue
            j += 1
            pv[j] = d
            rem[j] = rm
            c[j] = -1
    return float(best_f), best_c * h


def _tracenorm_only(A):
    return float(np.sum(np.abs(np.linalg.eigvalsh(A))))


def oracle_general(Rho, N, res):
    m = N.shape[0]
    h = 1.0 / res
    best_f = np.inf
    best_c = np.zeros(m, dtype=np.int64)
    best_c[0] = res
    c = np.zeros(m, dtype=np.int64)
    rem = np.zeros(m, dtype=np.int64)
    pv = np.zeros((m,) + Rho.shape, dtype=np.complex128)
    pv[0] = Rho
    rem[0] = res
    j = 0
    c[0] = -1
    while True:
        c[j] += 1
        if c[j] > rem[j]:
            j -= 1
            if j < 0:
                break
            continue
        rm = rem[j] - c[j]
        A = pv[j] - c[j] * h * N[j]
        if j == m - 2:
            f = _tracenorm_only(A - rm * h * N[m - 1])
            if f < best_f:
                best_f = f
                best_c[: m - 1] = c[: m - 1]
                best_c[m - 1] = rm
        else:
            if _tracenorm_only(A) - rm * h >= best_f:
                continue
            j += 1
            pv[j] = A
            rem[j] = rm
            c[j] = -1
    return float(best_f), best_c * h


def pairwise_descent_general(Rho, N, w, f, step):
    m = N.shape[0]
    w = w.copy()
    improved = True
    guard = 0
    while improved and guard < 100000:
        improved = False
        for i in range(m):
            if w[i] < step - 1e-15:
                continue
            for j in range(m):
                if j == i:
                    continue
                w[i] -= step
                w[j] += step
                fn = _tracenorm_only(Rho - np.tensordot(w, N, axes=1))
                if fn < f - 1e-15:
                    f = fn
                    improved = True
                    guard += 1
                    if w[i] < step - 1e-15:
                        break
                else:
                    w[i] += step
                    w[j] -= step
    return f, w
