"""Command-line client for the service.

Every data command builds a request, sends it to the HTTP API and renders the
response. By default the service runs in-process (no server needed); pass
--server to target a running instance instead. Failures print the service's
machine-readable error record to stderr and exit nonzero.
"""

from __future__ import annotations

import json
import sys

import click
import httpx

DEFAULT_DATASETS = ("synth:fourclass", "synth:breastcancer")
DEFAULT_MODELS = ("svm", "fsvm", "gbsvm", "gbfsvm")


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server.rstrip("/"), timeout=None)
    from .service.app import create_app

    transport = httpx.ASGITransport(app=create_app())
    return httpx.Client(transport=transport, base_url="http://gbfsvm.internal", timeout=None)


def _fail(record: dict) -> None:
    click.echo(json.dumps(record), err=True)
    sys.exit(1)


def _post(server: str | None, path: str, payload: dict) -> dict:
    try:
        with _client(server) as client:
            resp = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        _fail({"error": {"type": type(exc).__name__, "message": str(exc)}})
    except Exception as exc:  # in-process transport surfaces exceptions directly
        _fail({"error": {"type": type(exc).__name__, "message": str(exc)}})
    if resp.status_code >= 400:
        try:
            record = resp.json()
        except ValueError:
            record = {"error": {"type": f"HTTP{resp.status_code}", "message": resp.text}}
        if "error" not in record:
            record = {"error": {"type": f"HTTP{resp.status_code}", "message": str(record)}}
        _fail(record)
    return resp.json()


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
        click.echo(f"wrote {output}")
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _label_column(value: str):
    try:
        return int(value)
    except ValueError:
        return value


def _pso_payload(pop, iters, inertia, c1, c2, penalty) -> dict:
    return {"pop": pop, "iters": iters, "inertia": inertia,
            "c1": c1, "c2": c2, "penalty": penalty}


server_option = click.option("--server", default=None, metavar="URL",
                             help="Target a running service instead of in-process.")
output_option = click.option("--output", default=None, type=click.Path(dir_okay=False),
                             help="Write to this file instead of stdout.")
pso_options = [
    click.option("--pso-pop", type=int, default=None, help="Swarm size (default: adaptive)."),
    click.option("--pso-iters", type=int, default=1050, show_default=True),
    click.option("--pso-inertia", type=float, default=0.5, show_default=True),
    click.option("--pso-c1", type=float, default=1.6, show_default=True),
    click.option("--pso-c2", type=float, default=1.6, show_default=True),
    click.option("--pso-penalty", type=float, default=None,
                 help="Equality penalty weight (default: 1000*C)."),
]


def _add(options):
    def deco(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return deco


@click.group()
@click.version_option(package_name="gbfsvm")
def main():
    """Granular-ball fuzzy SVM: ball covers, training, noise benchmarks."""


@main.command()
@click.option("--dataset", required=True,
              help="CSV path or synth:<name>[:<seed>] spec.")
@click.option("--label-column", default="-1", show_default=True,
              help="Label column name or index.")
@click.option("--purity", type=float, default=0.9, show_default=True)
@click.option("--radius-mode", type=click.Choice(["mean_distance", "max_distance"]),
              default="mean_distance", show_default=True)
@click.option("--epsilon", type=float, default=1e-6, show_default=True)
@click.option("--membership-mode", type=click.Choice(["samples", "center"]),
              default="samples", show_default=True)
@click.option("--noise", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--no-normalize", is_flag=True, help="Skip min-max normalization.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json",
              show_default=True)
@output_option
@server_option
def balls(dataset, label_column, purity, radius_mode, epsilon, membership_mode,
          noise, seed, no_normalize, fmt, output, server):
    """Cover a dataset with purity-constrained balls."""
    resp = _post(server, "/balls", {
        "dataset": dataset, "label_column": _label_column(label_column),
        "purity": purity, "radius_mode": radius_mode, "epsilon": epsilon,
        "membership_mode": membership_mode, "normalize": not no_normalize,
        "noise": noise, "seed": seed})
    if fmt == "json":
        _emit(json.dumps(resp, indent=2), output)
    else:
        lines = ["ball,radius,label,purity,membership,size,center"]
        for r in resp["balls"]:
            center = " ".join(repr(c) for c in r["center"])
            lines.append(f"{r['ball']},{r['radius']!r},{r['label']},{r['purity']!r},"
                         f"{r['membership']!r},{r['size']},{center}")
        _emit("\n".join(lines) + "\n", output)


@main.command()
@click.option("--dataset", required=True, help="CSV path or synth:<name>[:<seed>] spec.")
@click.option("--label-column", default="-1", show_default=True)
@click.option("--model",
              type=click.Choice(["svm", "fsvm", "gbsvm", "gbfsvm", "tfn", "gbfsvm-tfn"]),
              default="gbfsvm", show_default=True)
@click.option("--C", "C", type=float, default=10.0, show_default=True,
              help="Box constraint.")
@click.option("--purity", type=float, default=0.9, show_default=True)
@click.option("--lambda", "lam", type=float, default=0.9, show_default=True,
              help="Confidence level for the fuzzy-label model.")
@click.option("--noise", type=float, default=0.0, show_default=True,
              help="Training-label noise fraction.")
@click.option("--test-fraction", type=float, default=0.3, show_default=True)
@click.option("--runs", type=int, default=1, show_default=True,
              help="Optimizer restarts; the best dual objective wins.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--radius-mode", type=click.Choice(["mean_distance", "max_distance"]),
              default="mean_distance", show_default=True)
@click.option("--epsilon", type=float, default=1e-6, show_default=True)
@click.option("--membership-mode", type=click.Choice(["samples", "center"]),
              default="samples", show_default=True)
@click.option("--no-normalize", is_flag=True)
@_add(pso_options)
@click.option("--format", "fmt", type=click.Choice(["json", "summary"]), default="json",
              show_default=True)
@output_option
@server_option
def train(dataset, label_column, model, C, lam, purity, noise, test_fraction, runs,
          seed, radius_mode, epsilon, membership_mode, no_normalize,
          pso_pop, pso_iters, pso_inertia, pso_c1, pso_c2, pso_penalty,
          fmt, output, server):
    """Train one model and report accuracy on a held-out fold."""
    resp = _post(server, "/train", {
        "dataset": dataset, "label_column": _label_column(label_column),
        "model": model, "C": C, "purity": purity, "lam": lam, "noise": noise,
        "test_fraction": test_fraction, "runs": runs, "seed": seed,
        "radius_mode": radius_mode, "epsilon": epsilon,
        "membership_mode": membership_mode, "normalize": not no_normalize,
        "pso": _pso_payload(pso_pop, pso_iters, pso_inertia, pso_c1, pso_c2, pso_penalty)})
    if fmt == "json":
        _emit(json.dumps(resp, indent=2), output)
    else:
        _emit("\n".join([
            f"dataset:        {resp['dataset']}",
            f"model:          {resp['model']} (C={resp['C']})",
            f"units:          {resp['units']}",
            f"test accuracy:  {resp['test_accuracy']:.4f}",
            f"train accuracy: {resp['train_accuracy']:.4f}",
            f"objective:      {resp['objective']:.6f}",
            f"wall time:      {resp['wall_time']:.2f}s",
        ]), output)


@main.command()
@click.option("--dataset", "datasets", multiple=True,
              help="Repeatable; defaults to the two bundled synthetic sets.")
@click.option("--model", "models", multiple=True,
              type=click.Choice(["svm", "fsvm", "gbsvm", "gbfsvm", "tfn", "gbfsvm-tfn"]),
              help="Repeatable; defaults to svm, fsvm, gbsvm, gbfsvm.")
@click.option("--noise", "noise_levels", multiple=True, type=float,
              help="Repeatable; defaults to 0%..30% in 5% steps.")
@click.option("--label-column", default="-1", show_default=True)
@click.option("--C", "C", type=float, default=10.0, show_default=True)
@click.option("--purity", type=float, default=None,
              help="Fixed threshold; default picks one per dataset and noise "
                   "level on a validation fold.")
@click.option("--lambda", "lam", type=float, default=0.9, show_default=True)
@click.option("--runs", type=int, default=4, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--test-fraction", type=float, default=0.3, show_default=True)
@click.option("--epsilon", type=float, default=1e-6, show_default=True)
@click.option("--radius-mode", type=click.Choice(["mean_distance", "max_distance"]),
              default="mean_distance", show_default=True)
@click.option("--membership-mode", type=click.Choice(["samples", "center"]),
              default="samples", show_default=True)
@_add(pso_options)
@click.option("--format", "fmt", type=click.Choice(["markdown", "csv", "json"]),
              default="markdown", show_default=True)
@output_option
@server_option
def bench(datasets, models, noise_levels, label_column, C, purity, lam, runs, seed,
          test_fraction, epsilon, radius_mode, membership_mode,
          pso_pop, pso_iters, pso_inertia, pso_c1, pso_c2, pso_penalty,
          fmt, output, server):
    """Sweep label-noise levels and tabulate accuracy and wall-clock cost."""
    resp = _post(server, "/bench", {
        "datasets": list(datasets or DEFAULT_DATASETS),
        "models": list(models or DEFAULT_MODELS),
        "noise_levels": list(noise_levels) if noise_levels else None,
        "label_column": _label_column(label_column),
        "C": C, "purity": purity, "lam": lam, "runs": runs, "seed": seed,
        "test_fraction": test_fraction, "epsilon": epsilon,
        "radius_mode": radius_mode, "membership_mode": membership_mode,
        "pso": _pso_payload(pso_pop, pso_iters, pso_inertia, pso_c1, pso_c2, pso_penalty),
        "include_tables": fmt != "json"})
    if fmt == "json":
        _emit(json.dumps(resp, indent=2), output)
    elif fmt == "csv":
        _emit(resp["csv"], output)
    else:
        _emit(resp["markdown"], output)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
