"""Command line for the toolkit: same verbs as the HTTP service.

All commands talk to a file-backed repository named by --repo or the
PC4PM_REPO environment variable.  Secrets are only ever passed by naming an
environment variable, never as a literal argument.
"""

from __future__ import annotations

import json

import click

from . import connector as connector_mod
from .analysis import data_utility, disclosure_risk, render_risk, render_utility
from .ela import parse_ela
from .errors import Pc4pmError
from .guidance import GuideQuery, filter_techniques, registry, runner_schema
from .jobs import JobRunner
from .ops import KeySpec
from .repo import REPO_ENV, Repository
from .stats import variants
from .xes import parse_xes


def _repo(ctx) -> Repository:
    return Repository(ctx.obj.get("root"))


def _load_log(repo, entry_id):
    entry = repo.get(entry_id)
    if entry.kind != "xes":
        raise click.ClickException(f"entry {entry_id} is {entry.kind!r}, not an event log")
    return parse_xes(repo.content(entry_id))


def _fail_on(exc: Pc4pmError):
    raise click.ClickException(f"{type(exc).__name__}: {exc}")


@click.group()
@click.option(
    "--repo",
    "root",
    envvar=REPO_ENV,
    default=None,
    metavar="DIR",
    help=f"Repository directory (defaults to ${REPO_ENV} or ~/.pc4pm).",
)
@click.pass_context
def main(ctx, root):
    """Privacy and confidentiality tooling for process-mining event logs."""
    ctx.obj = {"root": root}


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--name", default=None, help="Display name (defaults to the file name).")
@click.pass_context
def upload(ctx, path, name):
    """Store an .xes event log or .ela abstraction in the repository."""
    lowered = path.lower()
    if lowered.endswith(".xes"):
        kind = "xes"
    elif lowered.endswith(".ela"):
        kind = "ela"
    else:
        raise click.ClickException("expected an .xes or .ela file")
    with open(path, "rb") as fh:
        content = fh.read()
    try:
        entry = _repo(ctx).store(content, kind=kind, name=name or click.format_filename(path))
    except Pc4pmError as exc:
        _fail_on(exc)
    click.echo(f"{entry.entry_id}  {entry.kind}  {entry.name}")


@main.command()
@click.pass_context
def logs(ctx):
    """List repository entries."""
    for entry in _repo(ctx).list_entries():
        technique = entry.technique or "-"
        click.echo(f"{entry.entry_id}  {entry.kind:3}  {technique:24}  {entry.name}")


@main.command()
@click.argument("entry_id")
@click.pass_context
def show(ctx, entry_id):
    """Print one entry's metadata (plus a summary for event logs)."""
    repo = _repo(ctx)
    try:
        entry = repo.get(entry_id)
    except Pc4pmError as exc:
        _fail_on(exc)
    doc = entry.as_dict()
    if entry.kind == "xes":
        log = parse_xes(repo.content(entry_id))
        doc["summary"] = {
            "traces": len(log.traces),
            "events": log.event_count,
            "variants": len(variants(log)),
            "operation_records": len(log.privacy_metadata.records),
        }
    click.echo(json.dumps(doc, indent=2))


@main.command()
@click.argument("entry_id")
@click.pass_context
def delete(ctx, entry_id):
    """Remove an entry from listings (its lineage stays resolvable)."""
    try:
        _repo(ctx).delete(entry_id)
    except Pc4pmError as exc:
        _fail_on(exc)
    click.echo(f"deleted {entry_id}")


@main.command()
@click.argument("entry_id")
@click.pass_context
def lineage(ctx, entry_id):
    """Print the ancestry graph of an entry as JSON."""
    try:
        click.echo(json.dumps(_repo(ctx).lineage(entry_id), indent=2))
    except Pc4pmError as exc:
        _fail_on(exc)


def _parse_param(raw: str):
    if "=" not in raw:
        raise click.ClickException(f"--param takes key=value, got {raw!r}")
    key, text = raw.split("=", 1)
    try:
        return key, json.loads(text)
    except json.JSONDecodeError:
        return key, text


@main.command()
@click.argument("technique")
@click.option("--input", "input_id", required=True, help="Entry id of the event log.")
@click.option(
    "--param",
    "params",
    multiple=True,
    metavar="KEY=VALUE",
    help="Technique parameter; VALUE is JSON when it parses, a string otherwise.",
)
@click.option("--seed", default=0, show_default=True, help="Seed for randomized steps.")
@click.option("--workers", default=1, show_default=True, help="Worker threads.")
@click.pass_context
def run(ctx, technique, input_id, params, seed, workers):
    """Run one technique on a stored log and store the outputs."""
    runner = JobRunner(_repo(ctx), max_workers=1)
    try:
        job_id = runner.submit(
            technique,
            input_id,
            dict(_parse_param(p) for p in params),
            seed=seed,
            worker_count=workers,
        )
        status = runner.wait(job_id, timeout=3600)
    except Pc4pmError as exc:
        _fail_on(exc)
    finally:
        runner.shutdown()
    if status["state"] != "done":
        raise click.ClickException(f"job failed: {status['error']}")
    for output in status["outputs"]:
        click.echo(output)


@main.command()
@click.option("--log", "entry_id", required=True, help="Entry id of the event log.")
@click.option(
    "--kind",
    default="set",
    show_default=True,
    type=click.Choice(["set", "multiset", "subsequence"]),
    help="Assumed background knowledge.",
)
@click.option("--l", "l", default=1, show_default=True, help="Adversary knowledge size.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of text.")
@click.pass_context
def risk(ctx, entry_id, kind, l, as_json):
    """Report re-identification risk of a stored log."""
    try:
        report = disclosure_risk(_load_log(_repo(ctx), entry_id), kind, l)
    except Pc4pmError as exc:
        _fail_on(exc)
    click.echo(json.dumps(report.as_dict(), indent=2) if as_json else render_risk(report))


@main.command()
@click.option("--original", required=True, help="Entry id of the source log.")
@click.option("--anonymized", required=True, help="Entry id of the anonymized log.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON instead of text.")
@click.pass_context
def utility(ctx, original, anonymized, as_json):
    """Compare an anonymized log against its source."""
    repo = _repo(ctx)
    try:
        report = data_utility(_load_log(repo, original), _load_log(repo, anonymized))
    except Pc4pmError as exc:
        _fail_on(exc)
    click.echo(
        json.dumps(report.as_dict(), indent=2) if as_json else render_utility(report)
    )


@main.command()
@click.option("--pmps", default=None, help="Process-mining perspective.")
@click.option("--pmac", default=None, help="Process-mining activity.")
@click.option("--prps", default=None, help="Privacy perspective.")
@click.option("--prac", default=None, help="Privacy activity.")
def guide(pmps, pmac, prps, prac):
    """Suggest techniques matching the four-dimension choices."""
    try:
        query = GuideQuery(pmps=pmps, pmac=pmac, prps=prps, prac=prac)
    except Pc4pmError as exc:
        _fail_on(exc)
    for technique_id in filter_techniques(query):
        click.echo(technique_id)


@main.command()
@click.option("--technique", default=None, help="Show one runner's parameters.")
def techniques(technique):
    """List the technique registry, or one runner's parameter schema."""
    if technique:
        try:
            click.echo(json.dumps(runner_schema(technique), indent=2))
        except Pc4pmError as exc:
            _fail_on(exc)
        return
    for signature in registry():
        doc = signature.as_dict()
        click.echo(f"{doc['technique_id']:18} {doc['summary']}")


@main.command()
@click.argument("ela_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--key-id", required=True, help="Key identifier used when encoding.")
@click.option("--key-env", required=True, help="Environment variable holding the secret.")
@click.option(
    "--dictionary",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Candidate activity labels, one per line.",
)
def decode(ela_path, key_id, key_env, dictionary):
    """Recover the follows-graph from an encoded abstraction file."""
    with open(ela_path, "rb") as fh:
        raw = fh.read()
    with open(dictionary, encoding="utf-8") as fh:
        labels = [line.strip() for line in fh if line.strip()]
    try:
        key = KeySpec.from_env(key_id, key_env)
        graph = connector_mod.decode(parse_ela(raw), key, labels)
    except Pc4pmError as exc:
        _fail_on(exc)
    for (src, tgt), count in sorted(graph.pair_counts.items()):
        click.echo(f"{src} -> {tgt}: {count}")
    for label, count in sorted(graph.start_counts.items()):
        click.echo(f"start {label}: {count}")
    for label, count in sorted(graph.end_counts.items()):
        click.echo(f"end {label}: {count}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.pass_context
def serve(ctx, host, port):
    """Start the HTTP service backed by the same repository."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(ctx.obj.get("root")), host=host, port=port)


if __name__ == "__main__":
    main()
