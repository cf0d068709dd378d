import math

import numpy as np
import pytest

from mmshare.quadrature import (
    QuadratureSpec,
    adaptive_panels,
    geometric_edges,
    integrate_vector,
)


class TestAdaptivePanels:
    def test_polynomial(self):
        spec = QuadratureSpec()
        val, err = adaptive_panels(lambda x: x * x, np.linspace(0, 1, 3), spec)
        assert val[0] == pytest.approx(1.0 / 3.0, rel=1e-14)
        assert err[0] < 1e-12

    def test_vector_valued(self):
        spec = QuadratureSpec(rtol=1e-12)
        f = lambda x: np.column_stack([np.sin(x), np.cos(x), np.exp(-x)])
        val, _ = adaptive_panels(f, np.linspace(0, math.pi, 5), spec)
        assert val[0] == pytest.approx(2.0, rel=1e-11)
        assert val[1] == pytest.approx(0.0, abs=1e-11)
        assert val[2] == pytest.approx(1.0 - math.exp(-math.pi), rel=1e-11)

    def test_sharp_feature_refined(self):
        spec = QuadratureSpec(rtol=1e-10)
        # bump visible to the initial nodes but needing many subdivisions
        f = lambda x: np.exp(-((x - 0.7071) ** 2) / 1e-3)
        val, _ = adaptive_panels(f, np.linspace(0, 1, 9), spec)
        assert val[0] == pytest.approx(math.sqrt(math.pi * 1e-3), rel=1e-9)

    def test_budget_exhaustion_raises(self):
        from mmshare.quadrature import QuadratureFailure

        spec = QuadratureSpec(rtol=1e-14, atol=1e-300, max_subdivisions=4)
        f = lambda x: np.abs(np.sin(50.0 * x)) ** 0.3
        with pytest.raises(QuadratureFailure):
            adaptive_panels(f, np.linspace(0, 1, 2), spec)

    def test_integrate_vector_wrapper(self):
        spec = QuadratureSpec()
        assert integrate_vector(np.exp, 0.0, 1.0, spec)[0] == pytest.approx(
            math.e - 1.0, rel=1e-12
        )


class TestGeometricEdges:
    def test_covers_interval(self):
        edges = geometric_edges(1.0, 1e6)
        assert edges[0] == 1.0 and edges[-1] == 1e6
        assert np.all(np.diff(edges) > 0)

    def test_zero_lower(self):
        edges = geometric_edges(0.0, 100.0)
        assert edges[0] == 0.0 and edges[-1] == 100.0
        assert len(edges) < 40

    def test_invalid(self):
        with pytest.raises(ValueError):
            geometric_edges(1.0, 1.0)


class TestSpecValidation:
    def test_positive_tolerances(self):
        with pytest.raises(ValueError):
            QuadratureSpec(rtol=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(atol=-1.0)
        with pytest.raises(ValueError):
            QuadratureSpec(max_subdivisions=1)
