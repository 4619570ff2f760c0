import pytest

import techdebt_game as tg


@pytest.fixture(scope="session")
def pack():
    return tg.default_pack()


@pytest.fixture
def state(pack):
    return tg.new_session(pack, tg.make_config(pack, seed=101))
