import hypothesis
import pytest

from ppscontext.scenarios import three_box

hypothesis.settings.register_profile("default", max_examples=25, deadline=None)
hypothesis.settings.load_profile("default")


@pytest.fixture
def box3():
    return three_box()
