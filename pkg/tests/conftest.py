import numpy as np
import pytest

from sesqc import _kernels


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    """Trigger any pending JIT compilation before timed tests run."""
    s = np.eye(3) + 0.01
    _kernels.jacobi_real(s)
    _kernels.jacobi_herm(s.astype(np.complex128))
