import json

import pytest

from pursuitlab.engine import World, run
from pursuitlab.episodelog import LogWriter, header_line, read_log, replay
from pursuitlab.errors import ReplayMismatchError, ScenarioError, StateIntegrityError
from pursuitlab.scenario import parse_scenario, scenario_hash


def write_log(path, scn, seed=None):
    seed = scn.seed if seed is None else seed
    with open(path, "w", encoding="utf-8") as fh:
        writer = LogWriter(fh, scn, seed)
        result = run(scn, seed=seed, on_record=writer.append)
    return result


CASES = {
    "capture": {
        "leader": {"policy": {"name": "straight", "duty": 0.0}},
        "follower": {"pose": {"x": -0.15}},
    },
    "noisy_zigzag": {
        "seed": 88,
        "timeout_s": 6.0,
        "leader": {"policy": {"name": "zigzag"}},
        "follower": {"pose": {"x": -0.2}},
    },
    "lossy_link": {
        "seed": 12,
        "timeout_s": 20.0,
        "leader": {"pose": {"x": 1.0, "heading": 1.2}, "policy": {"name": "straight", "duty": 0.4}},
        "follower": {
            "policy": {
                "name": "command_guided",
                "downlink": {"latency_ticks": 2, "drop_probability": 0.2},
                "uplink": {"latency_ticks": 1, "drop_probability": 0.2},
            }
        },
    },
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_replay_round_trip(tmp_path, name):
    scn = parse_scenario(CASES[name])
    path = tmp_path / f"{name}.jsonl"
    write_log(path, scn)
    report = replay(str(path))
    assert report.ok
    assert report.first_divergence is None
    assert report.ticks_checked > 0


def test_header_contents(tmp_path):
    scn = parse_scenario(CASES["capture"])
    path = tmp_path / "ep.jsonl"
    write_log(path, scn, seed=4242)
    header, records = read_log(str(path))
    assert header["kind"] == "header"
    assert header["v"] == 1
    assert header["seed"] == 4242
    assert header["scenario_hash"] == scenario_hash(scn)
    # the embedded scenario re-parses to the same canonical content
    assert scenario_hash(parse_scenario(header["scenario"])) == header["scenario_hash"]
    assert records[0]["tick"] == 0
    assert records[-1]["events"] == ["capture"]


def test_tampered_record_detected(tmp_path):
    scn = parse_scenario(CASES["capture"])
    path = tmp_path / "ep.jsonl"
    write_log(path, scn)
    lines = path.read_text().splitlines()
    line_no = 5
    assert "0." in lines[line_no - 1]
    lines[line_no - 1] = lines[line_no - 1].replace("0.", "0.0", 1)
    path.write_text("\n".join(lines) + "\n")
    report = replay(str(path))
    assert not report.ok
    assert report.first_divergence == line_no


def test_tampered_header_detected(tmp_path):
    scn = parse_scenario(CASES["capture"])
    path = tmp_path / "ep.jsonl"
    write_log(path, scn)
    lines = path.read_text().splitlines()
    header = json.loads(lines[0])
    header["seed"] = header["seed"]  # keep it parsable...
    header["scenario_hash"] = "0" * 64  # ...but break the recorded hash
    lines[0] = json.dumps(header, sort_keys=True, separators=(",", ":"))
    path.write_text("\n".join(lines) + "\n")
    report = replay(str(path))
    assert not report.ok
    assert report.first_divergence == 1


def test_truncated_log_detected(tmp_path):
    scn = parse_scenario(CASES["capture"])
    path = tmp_path / "ep.jsonl"
    write_log(path, scn)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:-2]) + "\n")
    report = replay(str(path))
    assert not report.ok


def test_appended_garbage_detected(tmp_path):
    scn = parse_scenario(CASES["capture"])
    path = tmp_path / "ep.jsonl"
    write_log(path, scn)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write('{"kind":"tick","tick":999}\n')
    report = replay(str(path))
    assert not report.ok


def test_strict_mode_raises(tmp_path):
    scn = parse_scenario(CASES["capture"])
    path = tmp_path / "ep.jsonl"
    write_log(path, scn)
    lines = path.read_text().splitlines()
    lines[3] = lines[3].replace("0.", "0.0", 1)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ReplayMismatchError):
        replay(str(path), strict=True)


def test_strict_mode_ok_on_clean_log(tmp_path):
    scn = parse_scenario(CASES["capture"])
    path = tmp_path / "ep.jsonl"
    write_log(path, scn)
    assert replay(str(path), strict=True).ok


def test_empty_file_rejected(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    with pytest.raises(ScenarioError):
        replay(str(path))
    with pytest.raises(ScenarioError):
        read_log(str(path))


def test_missing_header_rejected(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"kind":"tick","tick":0}\n')
    with pytest.raises(ScenarioError):
        replay(str(path))


def test_header_line_is_canonical_json():
    scn = parse_scenario(CASES["capture"])
    line = header_line(scn, 9)
    assert json.loads(line)["seed"] == 9
    assert "\n" not in line


def test_aborted_episode_replays(tmp_path, monkeypatch):
    """A deterministic mid-episode failure round-trips through the log."""
    scn = parse_scenario(CASES["capture"])

    original_step = World.step

    def failing_step(self):
        if self.tick >= 3:
            raise StateIntegrityError("deterministic fault")
        return original_step(self)

    monkeypatch.setattr(World, "step", failing_step)
    path = tmp_path / "abort.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        writer = LogWriter(fh, scn, scn.seed)
        with pytest.raises(StateIntegrityError):
            run(scn, on_record=writer.append)
    lines = path.read_text().splitlines()
    assert '"abort"' in lines[-1]
    report = replay(str(path))
    assert report.ok
