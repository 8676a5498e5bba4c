import pytest
from pydantic import ValidationError

from mesh_stego.core.errors import ParamsMismatchError
from mesh_stego.embedding.params import PARAMS_VERSION, StegoParams


@pytest.fixture
def params():
    return StegoParams(
        k_star=6,
        h_star=20,
        changes=[-1, 0, 1, 2],
        q=2,
        alpha=3.0,
        alpha_split=[1.0, 1.0, 1.0],
        stc_h=12,
        stc_seed=7,
        msg_lens=[[10, 12], [10, 12], [9, 11]],
        n_vertices=42,
    )


def test_text_round_trip(params):
    text = params.to_text()
    assert "msg_lens = 10,12;10,12;9,11" in text
    assert f"version = {PARAMS_VERSION}" in text
    assert StegoParams.from_text(text).model_dump() == params.model_dump()
    assert params.message_bits == 64


def test_comments_and_blank_lines_are_ignored(params):
    text = "# written by mesh-stego\n\n" + params.to_text() + "\n   \n"
    assert StegoParams.from_text(text).model_dump() == params.model_dump()


@pytest.mark.parametrize(
    "extra",
    ["colour = red", "k_star = 6", "this line has no separator"],
)
def test_rejects_bad_lines(params, extra):
    with pytest.raises(ParamsMismatchError):
        StegoParams.from_text(params.to_text() + extra + "\n")


@pytest.mark.parametrize(
    "old,new",
    [
        ("msg_lens = 10,12;10,12;9,11", "msg_lens = 10,12;10,12"),
        ("msg_lens = 10,12;10,12;9,11", "msg_lens = 10;10;9"),
        ("msg_lens = 10,12;10,12;9,11", "msg_lens = 10,12;10,12;9,43"),
        ("channel_order = x,y,z", "channel_order = x,x,z"),
        ("changes = -1,0,1,2", "changes = 1,2"),
        ("stc_h = 12", "stc_h = 4"),
        ("k_star = 6", "k_star = six"),
        ("version = 1", "version = 9"),
    ],
)
def test_rejects_invalid_values(params, old, new):
    text = params.to_text()
    assert old in text
    with pytest.raises(ParamsMismatchError):
        StegoParams.from_text(text.replace(old, new))


def test_missing_key_is_a_mismatch(params):
    text = "\n".join(line for line in params.to_text().splitlines() if not line.startswith("stc_seed"))
    with pytest.raises(ParamsMismatchError):
        StegoParams.from_text(text)


def test_direct_construction_validates(params):
    with pytest.raises(ValidationError):
        StegoParams(**{**params.model_dump(), "alpha_split": [1.0, 2.0]})
