import json
from unittest.mock import patch

import pytest

from infrastructure.repositories.jsonl_trace_repository import JsonlTraceRepository
from interface.cli.main import build_parser, config_overrides, main
from tests.helpers.mock_factories import TEDDY_CAPTION, TraceFactory

SMALL = ["--steps", "12", "--samples", "1"]


@pytest.fixture(autouse=True)
def single_thread():
    with patch("interface.cli.main.torch.set_num_threads"):
        yield


class TestArgumentParsing:
    def test_overrides_skip_unset_flags(self):
        args = build_parser().parse_args(["run", "--caption", "a red ball", "--w", "4"])

        overrides = config_overrides(args)

        assert overrides["caption"] == "a red ball"
        assert overrides["schedule"]["w"] == 4
        assert overrides["schedule"]["fallback"] is None
        assert overrides["training"]["enabled"] is None

    def test_flags_map_to_sections(self):
        args = build_parser().parse_args(
            ["train", "--strict", "--no-injection", "--fixed-steps", "3", "9", "--lam", "0.5"]
        )

        overrides = config_overrides(args)

        assert overrides["schedule"]["fallback"] is False
        assert overrides["schedule"]["fixed_steps"] == [3, 9]
        assert overrides["simulation"]["injection"] is False
        assert overrides["training"] == {"enabled": True, "steps": None, "lr": None, "lambda": 0.5}

    def test_missing_subcommand_is_usage_error(self):
        assert main([]) == 2

    def test_help_exits_cleanly(self, capsys):
        assert main(["--help"]) == 0
        assert "split-dit" in capsys.readouterr().out


class TestPipelineCommands:
    def test_run_without_caption(self, tmp_path, capsys):
        assert main(["run", "--out", str(tmp_path)]) == 2
        assert "caption is required" in capsys.readouterr().err

    def test_invalid_config_value(self, tmp_path, capsys):
        assert main(["run", "--caption", TEDDY_CAPTION, "--w", "0"]) == 2
        assert "Invalid pipeline configuration" in capsys.readouterr().err

    def test_run_writes_artifacts(self, tmp_path, capsys):
        out = tmp_path / "run"

        code = main(["run", "--caption", TEDDY_CAPTION, "--out", str(out), *SMALL])

        assert code == 0
        stdout = capsys.readouterr().out
        assert "run: wrote" in stdout
        assert "schedule: s_obj=0" in stdout
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["algorithm"] == "sha256"
        assert "latent.tseq" in manifest["artifacts"]

    def test_config_file_and_flags(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"caption": TEDDY_CAPTION, "seed": 3}))
        out = tmp_path / "run"

        assert main(["parse", "--config", str(config), "--out", str(out)]) == 0
        assert main(["split", "--config", str(config), "--out", str(out)]) == 0

        assert (out / "split.txt").read_text().startswith("[OBJECT] teddy bear")
        assert json.loads((out / "config.json").read_text())["seed"] == 3

    def test_stage_failure(self, tmp_path, capsys):
        code = main(["run", "--caption", "colorless green ideas sleep furiously", "--out", str(tmp_path)])

        assert code == 1
        assert "stage 'parse' failed" in capsys.readouterr().err

    def test_llm_parser_offline_cache_miss(self, tmp_path, capsys):
        code = main(
            [
                "parse",
                "--caption", TEDDY_CAPTION,
                "--parser", "llm",
                "--cache-dir", str(tmp_path / "cache"),
                "--out", str(tmp_path / "run"),
            ]
        )

        assert code == 1
        assert "split-dit: stage 'parse' failed" in capsys.readouterr().err

    def test_split_before_parse(self, tmp_path, capsys):
        assert main(["split", "--out", str(tmp_path)]) == 1
        assert "stage 'split' failed" in capsys.readouterr().err

    def test_schedule_from_external_traces(self, tmp_path, capsys):
        traces = JsonlTraceRepository(tmp_path / "external")
        for trace in TraceFactory.planted_batch(steps=20, knee=4, converge=10):
            traces.save(trace)
        out = tmp_path / "run"

        code = main(
            [
                "schedule",
                "--traces", str(tmp_path / "external"),
                "--w", "3",
                "--tau", "1e-4",
                "--theta", "1e-8",
                "--mode", "index",
                "--out", str(out),
            ]
        )

        assert code == 0
        assert "schedule: s_obj=0 s_rel=4 s_attr=10" in capsys.readouterr().out
        document = json.loads((out / "schedule.json").read_text())
        assert document["config"]["steps"] == 20
        assert not (out / "traces").exists()

    def test_traces_option_belongs_to_schedule(self, capsys):
        assert main(["split", "--traces", "somewhere"]) == 2


class TestReportCommand:
    def test_report_on_missing_run(self, tmp_path, capsys):
        assert main(["report", str(tmp_path / "nowhere")]) == 1
        assert "stage 'report' failed" in capsys.readouterr().err

    def test_report_after_run(self, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(["run", "--caption", TEDDY_CAPTION, "--out", str(out), *SMALL]) == 0
        capsys.readouterr()

        assert main(["report", str(out), "--out", str(tmp_path / "report")]) == 0

        assert "== run run ==" in capsys.readouterr().out
        assert (tmp_path / "report" / "report.json").exists()
