"""Engine configuration: loading, flag overrides, all-at-once validation."""

import json

import pytest

from stlfalsify.config import EngineConfig, build_config, load_config
from stlfalsify.envs import DEFAULT_CONTROLLERS, NoiseSpec
from stlfalsify.errors import ConfigError
from stlfalsify.optim import AnnealParams
from stlfalsify.stl import parse


class TestLoading:
    def test_toml_file(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('task = "PR"\nbudget = 120\nnoise = true\n', encoding="utf-8")
        cfg = build_config(load_config(str(path)))
        assert cfg.tasks == ("PR",)
        assert cfg.budget == 120
        assert cfg.noise is True

    def test_json_file(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"task": ["PR", "BB"], "seed": 5}), encoding="utf-8")
        cfg = build_config(load_config(str(path)))
        assert cfg.tasks == ("PR", "BB")
        assert cfg.seed == 5

    def test_unknown_extension(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("task: PR\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(str(path))

    def test_root_must_be_a_table(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(str(path))

    def test_malformed_toml(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("task = \n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(str(path))


class TestDefaults:
    def test_documented_defaults(self):
        cfg = build_config({"task": "PR"})
        assert cfg.optimizer == "dual_annealing"
        assert cfg.optimizers is None
        assert cfg.trials is None  # command-specific default applied later
        assert cfg.budget == 300
        assert cfg.seed == 0
        assert cfg.jobs == 0
        assert cfg.spec_kind == "success"
        assert cfg.defect is False
        assert cfg.defect_volume == 0.02
        assert cfg.defect_seed == 0
        assert cfg.noise is False
        assert cfg.noise_variance == 0.25

    def test_flags_win_over_file_values(self):
        cfg = build_config({"task": "PR", "budget": 100}, {"budget": 9, "seed": 4})
        assert cfg.budget == 9
        assert cfg.seed == 4

    def test_none_overrides_are_skipped(self):
        cfg = build_config({"task": "PR", "budget": 100}, {"budget": None})
        assert cfg.budget == 100


class TestValidation:
    def test_all_problems_reported_at_once(self):
        with pytest.raises(ConfigError) as err:
            build_config({
                "task": "XX", "budget": 0, "optimizer": "sgd", "mystery": 1,
                "trials": -1, "defect_volume": 2.0,
            })
        text = "\n".join(err.value.problems)
        for needle in ("task", "budget", "optimizer", "mystery", "trials", "defect_volume"):
            assert needle in text
        assert len(err.value.problems) >= 6

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as err:
            build_config({"task": "PR", "bugdet": 3})
        assert any("bugdet" in p for p in err.value.problems)

    def test_task_required_without_bridge(self):
        with pytest.raises(ConfigError) as err:
            build_config({})
        assert any("task" in p and "bridge" in p for p in err.value.problems)

    def test_bridge_lifts_task_requirement(self):
        cfg = build_config({"bridge": "stdio:server --flag", "spec": "G[0,3](x <= 1)"})
        assert cfg.tasks == ()
        assert cfg.bridge == "stdio:server --flag"

    def test_bridge_endpoint_syntax(self):
        for bad in ("http://x", "tcp:", "stdio:", "tcp:host:notaport", "tcp:host:0"):
            with pytest.raises(ConfigError):
                build_config({"bridge": bad})

    def test_spec_and_spec_path_exclusive(self):
        with pytest.raises(ConfigError) as err:
            build_config({"task": "PR", "spec": "x <= 1", "spec_path": "f.stl"})
        assert any("mutually exclusive" in p for p in err.value.problems)

    def test_stride_requires_bridge(self):
        with pytest.raises(ConfigError) as err:
            build_config({"task": "PR", "stl_stride": 5})
        assert any("stl_stride" in p for p in err.value.problems)
        cfg = build_config({"bridge": "tcp:localhost:4000", "stl_stride": 5})
        assert cfg.stl_stride == 5

    @pytest.mark.parametrize("key,value", [
        ("budget", "many"), ("seed", -1), ("jobs", -2), ("trials", 0),
        ("noise", "yes"), ("noise_variance", 0.0), ("defect_volume", 0.0),
        ("defect_seed", -3), ("defect_mode", "rusty"), ("spec_kind", "maybe"),
        ("task", 7), ("optimizers", "random"), ("v_max", "fast"),
        ("anneal_visit", 9.0),
    ])
    def test_range_and_type_rules(self, key, value):
        with pytest.raises(ConfigError):
            build_config({"task": "PR", key: value})

    def test_bool_is_not_an_int(self):
        with pytest.raises(ConfigError):
            build_config({"task": "PR", "budget": True})


class TestMaterialization:
    def test_controller_overrides_reach_the_environment(self):
        cfg = build_config({"task": "PR", "v_max": 2.5})
        assert cfg.controller_overrides() == {"v_max": 2.5}
        env = cfg.make_environment("PR")
        assert env.task_id == "PR"

    def test_defaults_have_no_overrides(self):
        assert build_config({"task": "PR"}).controller_overrides() == {}

    def test_anneal_params(self):
        cfg = build_config({"task": "PR", "anneal_initial_temp": 99.0,
                            "anneal_max_rounds": 10})
        assert cfg.anneal_params() == AnnealParams(initial_temp=99.0, max_rounds=10)
        assert build_config({"task": "PR"}).anneal_params() is None

    def test_anneal_params_only_for_dual_annealing(self):
        with pytest.raises(ConfigError):
            build_config({"task": "PR", "optimizer": "random", "anneal_visit": 2.0})

    def test_environment_with_defect_and_noise(self):
        cfg = build_config({
            "task": "BB", "defect": True, "defect_volume": 0.1, "defect_seed": 3,
            "noise": True, "noise_variance": 0.5,
        })
        env = cfg.make_environment("BB")
        trace = env.simulate((0.3, 0.0), seed=0)
        clean = build_config({"task": "BB"}).make_environment("BB").simulate((0.3, 0.0), seed=0)
        assert trace != clean

    def test_resolve_formula_inline_spec(self):
        cfg = build_config({"task": "PR", "spec": "G[0,3](finger_pos_x <= 1)"})
        assert cfg.resolve_formula("PR") == parse("G[0,3](finger_pos_x <= 1)")

    def test_resolve_formula_from_file(self, tmp_path):
        path = tmp_path / "req.stl"
        path.write_text("F[0,5](door_yaw >= 10)\n", encoding="utf-8")
        cfg = build_config({"task": "DO", "spec_path": str(path)})
        assert cfg.resolve_formula("DO") == parse("F[0,5](door_yaw >= 10)")

    def test_resolve_formula_builtin_kinds(self):
        from stlfalsify.envs import builtin_spec
        assert build_config({"task": "PR"}).resolve_formula("PR") == builtin_spec("PR", "success")
        cfg = build_config({"task": "PR", "spec_kind": "danger"})
        assert cfg.resolve_formula("PR") == builtin_spec("PR", "danger")

    def test_bridged_config_needs_explicit_spec(self):
        cfg = build_config({"bridge": "tcp:localhost:5000"})
        with pytest.raises(ConfigError):
            cfg.resolve_formula(None)


class TestRoundTrip:
    def test_to_dict_rebuilds_identically(self):
        cfg = build_config({
            "task": ["PR", "DO"], "optimizers": ["random", "dual_annealing"],
            "trials": 7, "budget": 50, "seed": 3, "defect": True,
            "v_max": 2.0, "anneal_visit": 2.1,
        })
        again = build_config(cfg.to_dict())
        assert again == cfg

    def test_to_dict_is_json_serializable(self):
        cfg = build_config({"task": "PR"})
        json.dumps(cfg.to_dict())
