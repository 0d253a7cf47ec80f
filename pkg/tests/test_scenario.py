import math

import pytest

from pursuitlab.errors import ScenarioError
from pursuitlab.scenario import (
    Scenario,
    load_scenario,
    parse_scenario,
    place_follower_behind,
    save_scenario,
    scenario_hash,
    scenario_to_dict,
)


def test_empty_document_gets_defaults():
    scn = parse_scenario({})
    assert scn.dt == 0.02
    assert scn.timeout_s == 120.0
    assert scn.seed == 2020
    assert scn.leader.policy["name"] == "straight"
    assert scn.follower.policy["name"] == "light_follow"
    assert scn.follower.rig is not None
    assert scn.effective_capture_radius() == pytest.approx(0.12)


def test_capture_radius_override():
    scn = parse_scenario({"capture_radius": 0.2})
    assert scn.effective_capture_radius() == 0.2


class TestUnknownFields:
    def test_top_level(self):
        with pytest.raises(ScenarioError, match="scenario.speling"):
            parse_scenario({"speling": 1})

    def test_nested_pose(self):
        with pytest.raises(ScenarioError, match="leader.pose.z"):
            parse_scenario({"leader": {"pose": {"z": 1.0}}})

    def test_nested_params(self):
        with pytest.raises(ScenarioError, match="follower.params.top_speed"):
            parse_scenario({"follower": {"params": {"top_speed": 1.0}}})

    def test_policy_knob(self):
        with pytest.raises(ScenarioError, match="leader.policy.wiggle"):
            parse_scenario({"leader": {"policy": {"name": "zigzag", "wiggle": 2}}})

    def test_policy_knob_from_other_policy(self):
        # zigzag knobs are not valid on a straight leader
        with pytest.raises(ScenarioError, match="leader.policy.period_s"):
            parse_scenario({"leader": {"policy": {"name": "straight", "period_s": 2.0}}})

    def test_link_field(self):
        with pytest.raises(ScenarioError, match="follower.policy.downlink.jitter"):
            parse_scenario(
                {
                    "follower": {
                        "policy": {"name": "command_guided", "downlink": {"jitter": 1}}
                    }
                }
            )

    def test_rig_field(self):
        with pytest.raises(ScenarioError, match="follower.rig.left.bias"):
            parse_scenario({"follower": {"rig": {"left": {"bias": 0.1}}}})


class TestValidation:
    def test_unknown_policy_name(self):
        with pytest.raises(ScenarioError, match="leader.policy.name"):
            parse_scenario({"leader": {"policy": {"name": "drunkard"}}})

    def test_follower_cannot_use_leader_policy(self):
        with pytest.raises(ScenarioError, match="follower.policy.name"):
            parse_scenario({"follower": {"policy": {"name": "zigzag"}}})

    def test_bad_search_value(self):
        with pytest.raises(ScenarioError, match="search"):
            parse_scenario({"follower": {"policy": {"name": "light_follow", "search": "spin"}}})

    def test_non_numeric_field(self):
        with pytest.raises(ScenarioError, match="dt"):
            parse_scenario({"dt": "fast"})

    def test_timeout_must_exceed_dt(self):
        with pytest.raises(ScenarioError, match="timeout_s"):
            parse_scenario({"dt": 0.02, "timeout_s": 0.01})

    def test_negative_arena(self):
        with pytest.raises(ScenarioError, match="arena_half_extent"):
            parse_scenario({"arena_half_extent": -1.0})

    def test_bad_capture_radius(self):
        with pytest.raises(ScenarioError, match="capture_radius"):
            parse_scenario({"capture_radius": 0.0})

    def test_bad_vehicle_params(self):
        with pytest.raises(ScenarioError, match="leader.params"):
            parse_scenario({"leader": {"params": {"speed_cap_fraction": 2.0}}})

    def test_bad_link_probability(self):
        with pytest.raises(ScenarioError):
            parse_scenario(
                {
                    "follower": {
                        "policy": {
                            "name": "command_guided",
                            "uplink": {"drop_probability": "often"},
                        }
                    }
                }
            )

    def test_seed_must_be_integer(self):
        with pytest.raises(ScenarioError, match="seed"):
            parse_scenario({"seed": 1.5})

    def test_non_mapping_document(self):
        with pytest.raises(ScenarioError):
            parse_scenario([1, 2, 3])


class TestRig:
    def test_rig_defaulted_for_light_follow(self):
        scn = parse_scenario({"follower": {"policy": {"name": "light_follow"}}})
        assert scn.follower.rig is not None
        assert scn.follower.rig.left.mount_angle == pytest.approx(math.radians(30.0))

    def test_no_rig_for_chase_policies(self):
        scn = parse_scenario({"follower": {"policy": {"name": "tail_chase"}}})
        assert scn.follower.rig is None

    def test_explicit_rig_kept_for_chase_policy(self):
        scn = parse_scenario(
            {"follower": {"policy": {"name": "tail_chase"}, "rig": {"ambient": 0.05}}}
        )
        assert scn.follower.rig is not None
        assert scn.follower.rig.ambient == 0.05


class TestRoundTrip:
    def test_save_load_preserves_hash(self, tmp_path):
        scn = parse_scenario(
            {
                "seed": 77,
                "leader": {"policy": {"name": "zigzag", "duty": 0.35}},
                "follower": {"pose": {"x": -0.3, "heading": 0.1}},
            }
        )
        path = tmp_path / "scn.yaml"
        save_scenario(scn, str(path))
        again = load_scenario(str(path))
        assert scenario_hash(again) == scenario_hash(scn)
        assert scenario_to_dict(again) == scenario_to_dict(scn)

    def test_hash_changes_with_content(self):
        a = parse_scenario({"seed": 1})
        b = parse_scenario({"seed": 2})
        c = parse_scenario({"seed": 1, "leader": {"policy": {"name": "straight", "duty": 0.9}}})
        assert scenario_hash(a) != scenario_hash(b)
        assert scenario_hash(a) != scenario_hash(c)

    def test_hash_stable_across_calls(self):
        scn = parse_scenario({})
        assert scenario_hash(scn) == scenario_hash(scn)

    def test_yaml_syntax_error(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("leader: [unclosed\n")
        with pytest.raises(ScenarioError):
            load_scenario(str(path))


class TestPlacement:
    def test_directly_behind_heading_zero(self):
        template = parse_scenario({"leader": {"pose": {"x": 1.0, "y": 2.0, "heading": 0.0}}})
        placed = place_follower_behind(template, 0.4)
        assert placed.follower.pose.x == pytest.approx(0.6)
        assert placed.follower.pose.y == pytest.approx(2.0)
        assert placed.follower.pose.heading == 0.0

    def test_behind_rotated_leader(self):
        template = parse_scenario(
            {"leader": {"pose": {"x": 0.0, "y": 0.0, "heading": math.pi / 2}}}
        )
        placed = place_follower_behind(template, 0.25)
        assert placed.follower.pose.x == pytest.approx(0.0, abs=1e-12)
        assert placed.follower.pose.y == pytest.approx(-0.25)
        assert placed.follower.pose.heading == math.pi / 2

    def test_template_unchanged(self):
        template = parse_scenario({})
        before = scenario_hash(template)
        place_follower_behind(template, 0.3)
        assert scenario_hash(template) == before

    def test_bad_distance(self):
        with pytest.raises(ScenarioError):
            place_follower_behind(parse_scenario({}), 0.0)


def test_shipped_scenarios_parse():
    import glob
    import os

    root = os.path.join(os.path.dirname(__file__), "..", "scenarios")
    paths = sorted(glob.glob(os.path.join(root, "*.yaml")))
    assert len(paths) >= 8
    for path in paths:
        scn = load_scenario(path)
        assert isinstance(scn, Scenario)
