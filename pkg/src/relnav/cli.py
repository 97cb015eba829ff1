"""Command-line client for the relnav service.

The commands talk to the HTTP API; by default the service runs in
process, and --server-url points them at a remote instance instead. Exit
codes: 0 on success, 2 on invariant violations, 3 on solver
infeasibility.
"""

from __future__ import annotations

import json
import os
import sys

import click

EXIT_INVARIANT = 2
EXIT_INFEASIBLE = 3


def _client(server_url: str | None):
    if server_url:
        import httpx

        return httpx.Client(base_url=server_url, timeout=300.0)
    from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _fail(resp) -> None:
    detail = resp.json().get("detail", resp.text)
    click.echo(f"error: {detail}", err=True)
    if resp.status_code == 409:
        sys.exit(EXIT_INFEASIBLE)
    sys.exit(EXIT_INVARIANT)


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: {path}: {exc}", err=True)
        sys.exit(EXIT_INVARIANT)


@click.group()
def main() -> None:
    """Relative localization and coverage planning simulator."""


@main.command("run")
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(exists=False), help="Scenario JSON file.")
@click.option("--seed", type=int, default=None,
              help="Override the scenario seed.")
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Directory for metric files.")
@click.option("--baseline", is_flag=True,
              help="Run the unconstrained comparison planner.")
@click.option("--server-url", default=None, help="Remote service URL.")
def run_cmd(scenario_path, seed, out_dir, baseline, server_url) -> None:
    """Execute a scenario and write metric CSVs plus a JSON summary."""
    scenario = _read_json(scenario_path)
    with _client(server_url) as client:
        resp = client.post("/run", json={"scenario": scenario, "seed": seed,
                                         "baseline": baseline})
    if resp.status_code != 200:
        _fail(resp)
    payload = resp.json()
    os.makedirs(out_dir, exist_ok=True)
    for name, content in payload["files"].items():
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write(content)
    summary = payload["summary"]
    click.echo(json.dumps(summary, indent=2, sort_keys=True))
    terminal = summary.get("terminal") or ""
    if terminal.startswith("infeasible"):
        sys.exit(EXIT_INFEASIBLE)


@main.command("rigidity")
@click.option("--framework", "framework_path", required=True,
              type=click.Path(exists=False),
              help="Framework JSON file: n_vertices, edges, positions.")
@click.option("--server-url", default=None, help="Remote service URL.")
def rigidity_cmd(framework_path, server_url) -> None:
    """One-shot connectivity and rigidity report for a framework."""
    framework = _read_json(framework_path)
    with _client(server_url) as client:
        resp = client.post("/rigidity", json=framework)
    if resp.status_code != 200:
        _fail(resp)
    click.echo(json.dumps(resp.json(), indent=2, sort_keys=True))


@main.command("plan")
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(exists=False), help="Scenario JSON file.")
@click.option("--baseline", is_flag=True,
              help="Plan with the unconstrained comparison solver.")
@click.option("--server-url", default=None, help="Remote service URL.")
def plan_cmd(scenario_path, baseline, server_url) -> None:
    """Planning only: neighborhoods, tours and lengths, no flight."""
    scenario = _read_json(scenario_path)
    with _client(server_url) as client:
        resp = client.post("/plan", json={"scenario": scenario,
                                          "baseline": baseline})
    if resp.status_code != 200:
        _fail(resp)
    click.echo(json.dumps(resp.json(), indent=2, sort_keys=True))


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve_cmd(host, port) -> None:
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run("relnav.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
