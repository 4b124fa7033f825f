import pytest

from cadnet.nn import available_backends, set_backend


@pytest.fixture(params=available_backends())
def backend(request):
    """Run the test once per installed conv backend, restoring it after."""
    previous = set_backend(request.param)
    yield request.param
    set_backend(previous)
