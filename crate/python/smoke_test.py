"""Smoke test for the biext extension module.

Build and install it first, e.g. `pip install --no-build-isolation -e crates/py`.
"""

import json

import biext


def main():
    for p in (2, 3, 5):
        f = biext.OrePoly.worked_example(p)
        assert f.is_skew()
        model = biext.metric_from_skew(f)
        assert model.size == p * p
        assert model.is_symmetric() and model.is_nondegenerate() and model.polarization_holds()
        group = model.metric_group()
        assert group.gauss_int() == -p
        assert group.witt_class() == "NormForm"

    f = biext.OrePoly.random_skew(3, 1, 2, 7)
    assert f.check_solvers()
    model = biext.metric_from_skew(f)
    assert model.log_size == 4
    line = next(a for a in range(1, model.size) if model.q(a)[0] == 0)
    down = biext.descend(f, model, [line])
    assert biext.metric_from_skew(down).size == 9

    phi = biext.OrePoly(3, 1, [(0, [1]), (1, [1])])
    up = biext.pullback(biext.OrePoly.worked_example(3), phi)
    assert up.kernel_size() == 81

    h = biext.MetricGroup.hyperbolic(3)
    nf = biext.MetricGroup.norm_form(3)
    assert h.witt_class() == "Zero"
    assert nf.direct_sum(nf).witt_class() == "Zero"
    assert biext.MetricGroup.from_json(nf.to_json()).witt_class() == "NormForm"

    report = json.loads(biext.metric_from_skew(biext.OrePoly.worked_example(3)).report())
    assert report["kernel_size"] == 9 and report["witt_class"] == "NormForm"
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
