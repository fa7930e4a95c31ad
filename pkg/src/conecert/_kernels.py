"""Hot numerical kernels with a numba backend and a pure-numpy fallback.

The only kernel is the alternating minimization of the block form
<xi (x) eta, C (xi (x) eta)> over unit vectors, which dominates the runtime
of positivity searches.  Backend selection:

  CONECERT_BACKEND=numba   force the jit kernel (error if numba is missing)
  CONECERT_BACKEND=numpy   force the einsum fallback
  unset or "auto"          numba when importable, else numpy

Both backends run the restarts sequentially and reduce with `<` in restart
order, so results are deterministic for a fixed start array.
"""

import os

import numpy as np

from .errors import SearchError

_ENV_FLAG = "CONECERT_BACKEND"

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    njit = None
    _HAVE_NUMBA = False


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if _HAVE_NUMBA else ("numpy",)


def resolve_backend(backend: str | None = None) -> str:
    """Map an explicit choice or the env flag onto an available backend."""
    choice = backend if backend is not None else os.environ.get(_ENV_FLAG, "auto")
    choice = choice.strip().lower()
    if choice in ("", "auto"):
        return "numba" if _HAVE_NUMBA else "numpy"
    if choice == "numba":
        if not _HAVE_NUMBA:
            raise SearchError("numba backend requested but numba is not importable")
        return "numba"
    if choice == "numpy":
        return "numpy"
    raise SearchError(f"unknown backend {choice!r}; use numba, numpy or auto")


def _descend_numpy(c4, eta, max_iters, conv_tol):
    eta = eta / np.linalg.norm(eta)
    prev = np.inf
    val = np.inf
    xi = np.zeros(c4.shape[0], dtype=np.complex128)
    for _ in range(max_iters):
        nmat = np.einsum("ikjl,k,l->ij", c4, eta.conj(), eta)
        _, v = np.linalg.eigh(0.5 * (nmat + nmat.conj().T))
        xi = np.ascontiguousarray(v[:, 0])
        mmat = np.einsum("ikjl,i,j->kl", c4, xi.conj(), xi)
        w, v = np.linalg.eigh(0.5 * (mmat + mmat.conj().T))
        eta = np.ascontiguousarray(v[:, 0])
        val = float(w[0])
        if abs(prev - val) <= conv_tol * (1.0 + abs(val)):
            break
        prev = val
    return val, xi, eta


def _block_minimize_numpy(c4, starts, max_iters, conv_tol, stop_below):
    best = np.inf
    best_xi = np.zeros(c4.shape[0], dtype=np.complex128)
    best_eta = np.zeros(c4.shape[1], dtype=np.complex128)
    used = 0
    for r in range(starts.shape[0]):
        used += 1
        val, xi, eta = _descend_numpy(c4, starts[r], max_iters, conv_tol)
        if val < best:
            best, best_xi, best_eta = val, xi, eta
        if best < stop_below:
            break
    return best, best_xi, best_eta, used


if _HAVE_NUMBA:

    @njit(cache=True)
    def _block_minimize_numba(c4, starts, max_iters, conv_tol, stop_below):  # pragma: no cover - jitted
        n = c4.shape[0]
        m = c4.shape[1]
        best = np.inf
        best_xi = np.zeros(n, dtype=np.complex128)
        best_eta = np.zeros(m, dtype=np.complex128)
        used = 0
        nmat = np.empty((n, n), dtype=np.complex128)
        mmat = np.empty((m, m), dtype=np.complex128)
        for r in range(starts.shape[0]):
            used += 1
            eta = starts[r].copy()
            nrm = 0.0
            for k in range(m):
                nrm += eta[k].real ** 2 + eta[k].imag ** 2
            nrm = np.sqrt(nrm)
            for k in range(m):
                eta[k] /= nrm
            xi = np.zeros(n, dtype=np.complex128)
            prev = np.inf
            val = np.inf
            for _ in range(max_iters):
                for i in range(n):
                    for j in range(n):
                        acc = 0.0 + 0.0j
                        for k in range(m):
                            ek = np.conj(eta[k])
                            for l in range(m):
                                acc += ek * c4[i, k, j, l] * eta[l]
                        nmat[i, j] = acc
                for i in range(n):
                    for j in range(i, n):
                        h = 0.5 * (nmat[i, j] + np.conj(nmat[j, i]))
                        nmat[i, j] = h
                        nmat[j, i] = np.conj(h)
                _, vn = np.linalg.eigh(nmat)
                for i in range(n):
                    xi[i] = vn[i, 0]
                for k in range(m):
                    for l in range(m):
                        acc = 0.0 + 0.0j
                        for i in range(n):
                            xic = np.conj(xi[i])
                            for j in range(n):
                                acc += xic * c4[i, k, j, l] * xi[j]
                        mmat[k, l] = acc
                for k in range(m):
                    for l in range(k, m):
                        h = 0.5 * (mmat[k, l] + np.conj(mmat[l, k]))
                        mmat[k, l] = h
                        mmat[l, k] = np.conj(h)
                wm, vm = np.linalg.eigh(mmat)
                for k in range(m):
                    eta[k] = vm[k, 0]
                val = wm[0]
                if np.abs(prev - val) <= conv_tol * (1.0 + np.abs(val)):
                    break
                prev = val
            if val < best:
                best = val
                for i in range(n):
                    best_xi[i] = xi[i]
                for k in range(m):
                    best_eta[k] = eta[k]
            if best < stop_below:
                break
        return best, best_xi, best_eta, used


def block_minimize(
    c4: np.ndarray,
    starts: np.ndarray,
    max_iters: int,
    conv_tol: float,
    stop_below: float,
    backend: str | None = None,
) -> tuple[float, np.ndarray, np.ndarray, int]:
    """Minimize the block form of a Hermitian Choi tensor over product vectors.

    c4 is the Choi matrix reshaped to (n, m, n, m); starts holds one eta seed
    per restart, shape (restarts, m).  Alternates exact minimization in xi
    (bottom eigenvector with eta fixed) and in eta (with xi fixed) until the
    value moves by less than conv_tol relatively, scanning restarts until one
    dips below stop_below or the budget runs out.

    Returns (best value, best xi, best eta, restarts used).
    """
    c4 = np.ascontiguousarray(c4, dtype=np.complex128)
    starts = np.ascontiguousarray(starts, dtype=np.complex128)
    if starts.ndim != 2 or starts.shape[1] != c4.shape[1]:
        raise SearchError(f"starts must be (restarts, {c4.shape[1]}), got {starts.shape}")
    if starts.shape[0] < 1 or max_iters < 1:
        raise SearchError("need at least one restart and one iteration")
    which = resolve_backend(backend)
    if which == "numba":
        best, xi, eta, used = _block_minimize_numba(
            c4, starts, max_iters, conv_tol, stop_below
        )
    else:
        best, xi, eta, used = _block_minimize_numpy(
            c4, starts, max_iters, conv_tol, stop_below
        )
    return float(best), xi, eta, int(used)
