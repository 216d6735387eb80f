import numpy as np
import pytest

CRITERIA = []


def record_criterion(number, ok, detail):
    CRITERIA.append(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    print(CRITERIA[-1])


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def natural_image():
    """Deterministic 32x40 image with gradients, texture and colour variation."""
    yy, xx = np.mgrid[0:32, 0:40]
    r = 0.5 + 0.4 * np.sin(xx / 5.0) * np.cos(yy / 7.0)
    g = np.clip(xx / 39.0 * 0.8 + 0.1 * ((xx // 4 + yy // 4) % 2), 0, 1)
    b = 0.3 + 0.5 * yy / 31.0
    return np.clip(np.stack([r, g, b], axis=-1), 0.0, 1.0)


def checkerboard(size=32, cell=1, low=0.0, high=1.0):
    yy, xx = np.mgrid[0:size, 0:size]
    board = ((yy // cell + xx // cell) % 2).astype(float)
    board = low + (high - low) * board
    return np.repeat(board[..., None], 3, axis=-1)


TOY_SEED = 2024
TOY_TRAIN = 200
TOY_HELD_OUT = 60


def run_pipeline(root, n_train, n_test, seed, epochs=None, kinds="hazy"):
    """toy -> train -> synthset -> eval (model and both baselines), all via the CLI."""
    import json
    from pathlib import Path

    from twicemix.cli import main

    root = Path(root)
    corpus, synth = root / "corpus", root / "synth"
    model, log = root / "model.json", root / "loss.csv"
    n = str(n_train)

    def run(*argv):
        code = main([str(a) for a in argv])
        assert code == 0, argv

    run("toy", "--out-dir", corpus, "--n", n_train + n_test, "--seed", seed, "--kinds", kinds)
    manifest = corpus / "manifest.csv"
    train = ["train", "--manifest", manifest, "--out", model, "--log", log, "--train-count", n]
    if epochs is not None:
        train += ["--epochs", epochs]
    run(*train)
    run("synthset", "--manifest", manifest, "--train-count", n, "--out-dir", synth)
    reports = {}
    for name, flag in (("model", ["--model", model]), ("uiqm", ["--metric", "uiqm"]),
                       ("uciqe", ["--metric", "uciqe"])):
        out = root / f"report_{name}.json"
        run("eval", "--synthset", synth, *flag, "--out", out)
        reports[name] = json.loads(out.read_text())
    return {"root": root, "model": model, "log": log, "manifest": manifest,
            "synth": synth, "reports": reports}


@pytest.fixture(scope="session")
def toy_pipeline(tmp_path_factory):
    """Default-config run on the hazy toy corpus; shared because training takes over a minute."""
    import time

    start = time.perf_counter()
    result = run_pipeline(tmp_path_factory.mktemp("toy"), TOY_TRAIN, TOY_HELD_OUT, TOY_SEED)
    result["seconds"] = time.perf_counter() - start
    return result
