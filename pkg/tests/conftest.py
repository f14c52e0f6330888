import numpy as np
import pytest
from skimage import data

from degradekit import imagecore as ic


@pytest.fixture(scope="session")
def natural_image():
    """A smooth natural photo (cat), at native resolution."""
    return ic.from_uint8(data.chelsea())


@pytest.fixture(scope="session")
def natural_crops():
    """60 natural 96x96 crops drawn from six bundled scikit-image photos."""
    rng = np.random.default_rng(2024)
    crops = []
    for name in ("astronaut", "coffee", "chelsea", "rocket", "hubble_deep_field", "immunohistochemistry"):
        photo = ic.from_uint8(getattr(data, name)())
        h, w = photo.shape[:2]
        for _ in range(10):
            y, x = rng.integers(0, h - 96), rng.integers(0, w - 96)
            crops.append(photo[y:y + 96, x:x + 96].copy())
    return crops


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# --- acceptance reporting ---------------------------------------------------------
# Tests marked ``@pytest.mark.criterion("...")`` get one PASS/FAIL line each in the
# terminal summary, in definition order.

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): an acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "setup":
        _criteria.setdefault(name, "PASS")
    if report.failed:
        _criteria[name] = "FAIL"
    elif report.skipped and report.when != "teardown":
        _criteria[name] = "SKIP"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _criteria.items():
        terminalreporter.write_line(f"{status}  {name}")
    passed = sum(status == "PASS" for status in _criteria.values())
    terminalreporter.write_line(f"{passed}/{len(_criteria)} criteria passed")
