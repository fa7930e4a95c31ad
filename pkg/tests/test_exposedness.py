import numpy as np
import pytest

from conecert.errors import ClassificationError, SearchError
from conecert.exposedness import (
    CertifyParams,
    FallbackParams,
    MapCase,
    Verdict,
    certify_exposed,
    classify,
    cone_fallback,
    conjugate_obstruction_space,
)
from conecert.faces import double_prime_nullspace
from conecert.maps import MapRep, SearchParams, choi_from_ad, choi_from_omega_q
from conecert.serialization import report_to_dict

rng = np.random.default_rng(41)

# trimmed budgets keep the unit tests fast; the acceptance suite runs the
# defaults
FAST = CertifyParams(
    search=SearchParams(restarts=24),
    fallback=FallbackParams(directions_per_dim=6, max_directions=16),
)


def crandn(*shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rand_unitary(d):
    q, r = np.linalg.qr(crandn(d, d))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def test_certify_identity_linear():
    for transposed in (False, True):
        report = certify_exposed(np.eye(2), transposed=transposed, params=FAST)
        assert report.verdict is Verdict.EXPOSED_LINEAR
        assert report.nullspace.dim == 1
        assert report.overlap_with_phi >= 1.0 - 1e-8
        assert report.fallback is None


def test_certify_full_rank_random():
    report = certify_exposed(crandn(3, 3), params=FAST)
    assert report.verdict is Verdict.EXPOSED_LINEAR
    assert report.nullspace.dim == 1


def test_certify_rank_one_cone_evidence():
    report = certify_exposed(np.diag([1.0, 0.0]), params=FAST)
    assert report.verdict is Verdict.EXPOSED_CONE_EVIDENCE
    assert report.nullspace.dim == 3
    fb = report.fallback
    assert fb is not None
    assert fb.all_violated
    assert fb.control_positive
    assert fb.misses == []
    assert len(fb.violations) == fb.directions_tested * len(fb.epsilons)
    for v in fb.violations:
        assert v.value < -1e-9


def test_certify_rank_one_transposed():
    report = certify_exposed(np.diag([1.0, 0.0]), transposed=True, params=FAST)
    assert report.verdict is Verdict.EXPOSED_CONE_EVIDENCE


def test_certify_scale_invariance():
    a = crandn(2, 2)
    base = certify_exposed(a, params=FAST)
    for c in (2.0, 1j, -3.0):
        rep = certify_exposed(c * a, params=FAST)
        assert rep.verdict is base.verdict
        assert rep.nullspace.dim == base.nullspace.dim
        assert abs(rep.overlap_with_phi - base.overlap_with_phi) < 1e-10


def test_certify_unitary_covariance():
    a = crandn(2, 2)
    base = certify_exposed(a, params=FAST)
    rep = certify_exposed(rand_unitary(2) @ a @ rand_unitary(2), params=FAST)
    assert rep.verdict is base.verdict
    assert rep.nullspace.dim == base.nullspace.dim


def test_certify_rejects_zero():
    report = certify_exposed(np.zeros((2, 3)))
    assert report.verdict is Verdict.INPUT_REJECTED
    assert report.nullspace.dim == 0
    assert report.overlap_with_phi == 0.0


def test_certify_deterministic_reports():
    a = np.diag([1.0, 0.0])
    d1 = report_to_dict(certify_exposed(a, params=FAST), include_timing=False)
    d2 = report_to_dict(certify_exposed(a, params=FAST), include_timing=False)
    assert d1 == d2


def test_cone_fallback_needs_dim_two():
    phi = choi_from_ad(np.eye(2) / np.sqrt(2))
    ns = double_prime_nullspace(phi)
    assert ns.dim == 1
    with pytest.raises(SearchError):
        cone_fallback(ns, phi)


def test_cone_fallback_rejects_off_span_map():
    phi = choi_from_ad(np.diag([1.0, 0.0]))
    ns = double_prime_nullspace(phi)
    other = choi_from_ad(crandn(2, 2) / 2)
    with pytest.raises(SearchError):
        cone_fallback(ns, other)


def test_obstruction_trichotomy():
    assert conjugate_obstruction_space(crandn(3, 3)).dim == 0
    assert conjugate_obstruction_space(crandn(2, 4)).dim == 0
    assert conjugate_obstruction_space(np.zeros((2, 2))).dim == 0
    assert conjugate_obstruction_space(np.diag([1.0, 0.0])).dim == 1


def test_obstruction_rank_one_basis_form():
    """for A = zeta rho* the solution line is spanned by zeta rho^T"""
    for n, m in [(2, 2), (3, 2), (2, 4)]:
        zeta, rho = crandn(n), crandn(m)
        a = np.outer(zeta, rho.conj())
        result = conjugate_obstruction_space(a)
        assert result.dim == 1
        b = result.basis[0]
        expect = np.outer(zeta, rho)
        corr = abs(np.vdot(expect, b)) / (np.linalg.norm(expect) * np.linalg.norm(b))
        assert abs(corr - 1.0) < 1e-8


def test_obstruction_probe_premise():
    """the paired-eigenvector probe rows satisfy <zeta_z, A rho_z> = 0"""
    a = crandn(3, 3)
    gram = a.conj().T @ a
    w, v = np.linalg.eigh((gram + gram.conj().T) / 2)
    for j in range(3):
        for k in range(j + 1, 3):
            avj, avk = a @ v[:, j], a @ v[:, k]
            nj = np.vdot(avj, avj).real
            nk = np.vdot(avk, avk).real
            for z in (1, -1, 1j, 2):
                rho = v[:, j] + z * v[:, k]
                zeta = -np.conj(z) * nk * avj + nj * avk
                assert abs(np.vdot(zeta, a @ rho)) < 1e-10 * nj * nk


def test_classify_ad_round_trip():
    b = crandn(3, 2)
    phi = choi_from_ad(b)
    cl = classify(phi)
    assert cl.case is MapCase.AD
    corr = abs(np.vdot(cl.b, b)) / (np.linalg.norm(cl.b) * np.linalg.norm(b))
    assert abs(corr - 1.0) < 1e-10
    rec = cl.reconstruct()
    assert np.abs(rec.choi - phi.choi).max() < 1e-8 * np.linalg.norm(phi.choi)


def test_classify_swap_as_transposed_identity():
    phi = choi_from_ad(np.eye(2), transposed=True)
    cl = classify(phi)
    assert cl.case is MapCase.AD_TRANSPOSE
    assert np.abs(cl.b - np.eye(2)).max() < 1e-10


def test_classify_ad_transpose_round_trip():
    b = crandn(2, 3)
    phi = choi_from_ad(b, transposed=True)
    cl = classify(phi)
    assert cl.case is MapCase.AD_TRANSPOSE
    rec = cl.reconstruct()
    assert np.abs(rec.choi - phi.choi).max() < 1e-8 * np.linalg.norm(phi.choi)


def test_classify_omega_q_round_trip():
    g = crandn(3, 2)
    r = g @ g.conj().T
    zeta = crandn(4)
    phi = choi_from_omega_q(r, zeta)
    cl = classify(phi)
    assert cl.case is MapCase.OMEGA_Q
    corr = abs(np.vdot(cl.zeta, zeta)) / (np.linalg.norm(cl.zeta) * np.linalg.norm(zeta))
    assert abs(corr - 1.0) < 1e-8
    rec = cl.reconstruct()
    assert np.abs(rec.choi - phi.choi).max() < 1e-8 * np.linalg.norm(phi.choi)


def test_classify_rejects_trace_map():
    trace_map = MapRep(n=2, m=2, choi=np.kron(np.eye(2), np.eye(2)))
    with pytest.raises(ClassificationError):
        classify(trace_map)
