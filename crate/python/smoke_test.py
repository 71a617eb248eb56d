"""Smoke test for the specpot_py extension.

Build and install first:  cd crates/python && maturin develop --release
"""

import math

import specpot_py as sp


def main():
    params, basis, xs, ell = sp.preset("fig4")
    assert params.bound_state_count() == 5
    assert abs(params.energies()[0] + 11.045) < 1e-12
    assert basis.case == "MORSE" and abs(basis.nu - 10.4) < 1e-12

    curve = sp.reconstruct(params, basis, 100, xs)
    a = params.mu - 0.5
    err = max(
        abs(v - 0.5 * (0.25 * math.exp(2 * x) + a * math.exp(x)))
        for x, v in zip(curve.xs, curve.vs)
    )
    assert err < 1e-8, err

    back = sp.PotentialCurve.from_json(curve.to_json())
    assert back.vs == curve.vs

    params, basis, xs, ell = sp.preset("fig2")
    curve = sp.reconstruct(params, basis, 100, xs).with_orbital(ell)
    report = sp.fit(curve, "HARMONIC", params.lambda_, orbital=ell)
    assert report.relative_rms < 1e-10, report

    sigma = params.sigma(4)
    assert sigma[0][1] == sigma[1][0] and sigma[0][2] == 0.0
    assert len(basis.kinetic(5)) == 5

    try:
        sp.PolyParams(-1.0, lambda_=-2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative lambda accepted")

    try:
        sp.fit(curve, "HARMONIC", 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("orbital flag mismatch accepted")

    print("smoke test passed: Morse error %.2e, fig2 fit %s" % (err, report))


if __name__ == "__main__":
    main()
