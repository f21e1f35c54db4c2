"""Smoke test for the `teig` extension module.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

import math

import teig


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    close(teig.bessel_zero(0, 1), 2.404825557695773, 1e-13)

    mesh = teig.Mesh(teig.Curve.circle(1.0), 40)
    assert len(mesh) == 40
    pairs = teig.beyn_solve(mesh, teig.MediumParams(4.0, 1.0, 0.0), teig.ContourConfig(center_mu=3.1))
    ks = sorted(p.k.real for p in pairs)
    oracle = []
    for r in teig.disk_roots("classical", 4.0, 2.6, 3.6):
        oracle += [r.k] * r.multiplicity
    assert len(ks) == len(oracle) == 5, (ks, oracle)
    for a, b in zip(ks, oracle):
        close(a, b, 5e-4)
    assert all(p.residual < 1e-4 for p in pairs)

    try:
        teig.Mesh(teig.Curve.circle(1.0), 7)
    except ValueError as e:
        assert "even" in str(e)
    else:
        raise AssertionError("odd node count accepted")

    rows = teig.sweep("conductive", 4.0, 0.5, [2.84], steps=10, reference="eta-zero")
    assert f"{rows[-1].k_values[0]:.4f}" == "2.9025"
    assert f"{rows[-1].eoc[0]:.4f}" == "1.0005"

    k1 = teig.first_eigenvalue("classical", 4.0)
    close(teig.estimate_n_small_eta(k1, 1.0, 0.1), 3.97999266429309, 1e-9)
    close(teig.estimate_n_large_eta(teig.bessel_zero(1, 1) / math.sqrt(3.0)), 3.0, 1e-12)

    label, value = teig.classify_limit(1.9159, 1.0, 4.0)
    assert value is not None, label

    print("teig smoke test OK")


if __name__ == "__main__":
    main()
