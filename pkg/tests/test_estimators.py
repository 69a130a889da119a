import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from xplattice.estimators import InverseModelSpectrum, ZeroCountingModel
from xplattice.exact_spectrum import counting_function
from xplattice.levels import LevelSequence
from xplattice.riemann import load_zeros


def test_inverse_spectrum_params_and_clone():
    est = InverseModelSpectrum(g=0.2, h=1.5, method="dense")
    assert est.get_params() == {"g": 0.2, "h": 1.5, "method": "dense", "n_jobs": 1}
    c = clone(est).set_params(g=0.0)
    assert c.g == 0.0 and est.g == 0.2


def test_inverse_spectrum_fit_transform_predict():
    est = InverseModelSpectrum().fit([1.0, 2.0])
    assert np.allclose(est.energies_, [-2 * math.sqrt(2), 2 * math.sqrt(2)])
    assert est.n_features_in_ == 2
    E = np.array([-10.0, 0.0, 10.0])
    assert np.allclose(est.transform(E), counting_function(E, [1.0, 2.0], math.pi / 2))
    assert list(est.predict(E)) == [0, 1, 2]


def test_inverse_spectrum_methods_agree():
    lv = LevelSequence.uniform(20, 0.4)
    a = InverseModelSpectrum(g=0.3, method="exact").fit(lv).energies_
    b = InverseModelSpectrum(g=0.3, method="dense").fit(lv).energies_
    assert np.allclose(a, b, rtol=1e-9)
    with pytest.raises(ValueError):
        InverseModelSpectrum(method="lanczos").fit(lv)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        InverseModelSpectrum().transform([1.0])
    with pytest.raises(NotFittedError):
        ZeroCountingModel().transform([1.0])


def test_zero_counting_model():
    z = load_zeros().head(40)
    m = ZeroCountingModel().fit(z)
    assert m.rms_ == pytest.approx(0.188102, abs=1e-3)
    assert m.score(z) == pytest.approx(-m.rms_)
    zeta = ZeroCountingModel(variant="zeta").fit(z)
    assert np.allclose(zeta.deviation_, m.deviation_, atol=1e-12)
    assert m.transform(14.134725)[0] == pytest.approx(0.4497, abs=5e-4)
    with pytest.raises(ValueError):
        ZeroCountingModel(variant="exact").fit(z)
