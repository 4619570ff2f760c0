"""Content pack loading, validation, registry, and coverage reporting."""

import copy
import random

import pytest
import yaml

import techdebt_game as tg
from techdebt_game.aha import AHA_REGISTRY, MECHANIC_TAGS, AhaGroup
from techdebt_game.content import (
    PackValidationError,
    coverage_report,
    load_pack,
    serialize_pack,
    validate_pack_data,
)


# ---------------------------------------------------------------------------
# registry

def test_registry_rows_and_groups():
    assert len(AHA_REGISTRY) == 32
    assert len(set(AHA_REGISTRY)) == 32
    by_group = {}
    for moment in AHA_REGISTRY.values():
        by_group.setdefault(moment.group, []).append(moment.variable)
    assert {g: len(v) for g, v in by_group.items()} == {
        AhaGroup.CAUSES: 9,
        AhaGroup.INCURRENCE: 2,
        AhaGroup.CONSEQUENCES: 7,
        AhaGroup.VICIOUS_CYCLE: 2,
        AhaGroup.REPAYMENT: 4,
        AhaGroup.ARCHITECTURE: 3,
        AhaGroup.TD_MANAGEMENT: 3,
        AhaGroup.BUSINESS: 2,
    }
    assert MECHANIC_TAGS < set(AHA_REGISTRY)
    for key, moment in AHA_REGISTRY.items():
        assert key == moment.key
        assert moment.description


# ---------------------------------------------------------------------------
# loading

def test_default_pack_loads_clean(pack):
    assert validate_pack_data(pack.to_data()) == []
    assert len(pack.event_cards) == 20
    assert len(pack.action_cards) == 12
    for module, slots in pack.board.items():
        assert slots[0].kind.value == "architecture"
        assert all(s.kind.value == "feature" for s in slots[1:])


def test_unworkable_ticket_rejected(pack):
    data = pack.to_data()
    data["tickets"][0]["blocked"] = [1, 2, 3, 4, 5, 6]
    errors = validate_pack_data(data)
    assert any("unworkable" in e.message for e in errors)


def test_unknown_aha_variable_rejected(pack):
    data = pack.to_data()
    data["event_cards"][0]["aha_tags"] = ["Causes/Weather"]
    errors = validate_pack_data(data)
    assert any("unknown aha variable" in e.message for e in errors)
    assert any("aha_tags" in e.path for e in errors)


def test_parse_failure_reports_path_root():
    with pytest.raises(PackValidationError) as exc:
        load_pack("pack_version: [unclosed")
    assert exc.value.errors[0].path == "/"


def test_event_cards_may_not_require_choices(pack):
    data = pack.to_data()
    data["event_cards"][0]["effect"] = [{"op": "add_td_chosen_digit"}]
    errors = validate_pack_data(data)
    assert any("cannot require a player choice" in e.message for e in errors)


def test_round_trip_serialization(pack):
    text = serialize_pack(pack)
    reloaded = load_pack(text)
    assert reloaded.to_data() == pack.to_data()
    assert serialize_pack(reloaded) == text


def test_load_from_file(tmp_path, pack):
    path = tmp_path / "pack.yaml"
    path.write_text(serialize_pack(pack), encoding="utf-8")
    assert load_pack(path).to_data() == pack.to_data()


CORRUPTIONS = [
    lambda d: d["tickets"][0].update(tasks=0),
    lambda d: d["tickets"][0].update(tasks=9),
    lambda d: d["tickets"][1].update(blocked=[1, 2, 3, 4, 5, 6]),
    lambda d: d["tickets"][1].update(blocked=[0]),
    lambda d: d["tickets"][2].update(kind="epic"),
    lambda d: d["tickets"][0].update(users=3),  # architecture row
    lambda d: d["tickets"][1].update(id=d["tickets"][2]["id"]),
    lambda d: d["board"]["A"][0].update(ticket="missing-ticket"),
    lambda d: d["board"]["A"][0].update(ticket=d["tickets"][1]["id"]),  # feature first
    lambda d: d["board"].pop("C"),
    lambda d: d["board"]["B"][1].update(trigger="mystery"),
    lambda d: d["event_cards"][0].update(effect=[]),
    lambda d: d["event_cards"][1].update(effect=[{"op": "fly"}]),
    lambda d: d["event_cards"][2].update(aha_tags=[]),
    lambda d: d["event_cards"][3].update(aha_tags=["Repayment/Weather"]),
    lambda d: d["event_cards"][4].update(title=""),
    lambda d: d["action_cards"][0].update(id=d["action_cards"][1]["id"]),
    lambda d: d["action_cards"][1].update(
        effect=[{"op": "block_digit_for_rounds", "digit": 7, "rounds": 1}]),
    lambda d: d["action_cards"][2].update(
        effect=[{"op": "remove_td", "selector": "volcano"}]),
    lambda d: d["defaults"].update(td_penalty=-1),
    lambda d: d["defaults"].update(max_rounds=0),
    lambda d: d.update(pack_version=99),
    lambda d: d.pop("name"),
    lambda d: d.pop("tickets"),
]


@pytest.mark.parametrize("corrupt", CORRUPTIONS,
                         ids=range(len(CORRUPTIONS)))
def test_validator_rejects_every_corruption(pack, corrupt):
    data = copy.deepcopy(pack.to_data())
    corrupt(data)
    errors = validate_pack_data(data)
    assert errors, "corruption slipped through"
    with pytest.raises(PackValidationError):
        load_pack(data)


def test_random_scalar_corruption_never_slips_through(pack):
    """Fuzz: flipping any schema-relevant scalar to junk must be rejected."""
    rng = random.Random(99)
    base = pack.to_data()
    for _ in range(100):
        data = copy.deepcopy(base)
        corrupt = rng.choice(CORRUPTIONS)
        corrupt(data)
        assert validate_pack_data(data)


# ---------------------------------------------------------------------------
# coverage

def test_default_pack_covers_every_registry_row(pack):
    report = coverage_report(pack)
    assert set(report) == set(AHA_REGISTRY)
    assert all(count >= 1 for count in report.values()), {
        k: v for k, v in report.items() if v < 1}


def test_empty_decks_cover_exactly_the_mechanic_rows(pack):
    bare = yaml.safe_load(serialize_pack(pack))
    bare["event_cards"] = []
    bare["action_cards"] = []
    # event deck may be empty only for this synthetic check
    report_pack = load_pack(bare)
    report = coverage_report(report_pack)
    for key, count in report.items():
        assert count == (1 if key in MECHANIC_TAGS else 0)


def test_coverage_is_additive_per_card(pack):
    data = pack.to_data()
    before = coverage_report(pack)["Business/Invisible"]
    data["event_cards"].append({
        "id": "ev-extra",
        "title": "Extra",
        "narrative": "One more symptom shows up.",
        "effect": [{"op": "add_td_random_digit", "selector": "random"}],
        "aha_tags": ["Business/Invisible"],
    })
    assert coverage_report(load_pack(data))["Business/Invisible"] == before + 1
