import functools
import json
import random
import sys
from pathlib import Path
from typing import Callable, List, Optional

import click
from pydantic import BaseModel, Field, TypeAdapter, ValidationError, model_validator

from config import configure_logging, load_settings
from corpus import random_regular_theory
from engine import ReasoningEngine
from errors import EngineError, PositionedError
from models import (
    CertificateModel,
    ChaseRequest,
    CheckRequest,
    DiagramModel,
    ForceRequest,
    ForcingKind,
    MorleyizeRequest,
    MorleyTarget,
    OracleRequest,
    OutputFormat,
    ParseRequest,
    ProofStatus,
    ProveRequest,
    Verdict,
)
from syntax import pretty_theory

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNRESOLVED = 2

KINDS = {"kripke": ForcingKind.KRIPKE, "beth-star": ForcingKind.BETH_STAR,
         "generalized-beth": ForcingKind.GENERALIZED_BETH}


class RunConfig(BaseModel):
    subcommand: str
    inputs: List[str] = Field(default_factory=list)
    output_format: OutputFormat = OutputFormat.TEXT
    fuel: Optional[int] = Field(None, gt=0)
    max_depth: Optional[int] = Field(None, ge=0)
    max_size: Optional[int] = Field(None, ge=0, le=4)
    seed: int = 0
    verbosity: int = Field(0, ge=0)

    @model_validator(mode="after")
    def dot_only_for_force(self) -> "RunConfig":
        if self.output_format == OutputFormat.DOT and self.subcommand != "force":
            raise ValueError("dot output is only available for force")
        return self


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(config: RunConfig, model: BaseModel, text: str) -> None:
    if config.output_format == OutputFormat.JSON:
        click.echo(model.model_dump_json(indent=2))
    else:
        click.echo(text, nl=not text.endswith("\n"))


def command(name: str):
    """Register a subcommand that builds its RunConfig and maps failures to exit status 1"""

    def decorate(fn: Callable[..., int]):
        @cli.command(name)
        @click.argument("theory_path", metavar="THEORY")
        @click.pass_context
        @functools.wraps(fn)
        def wrapper(ctx: click.Context, theory_path: str, **kwargs):
            try:
                config = RunConfig(subcommand=name, inputs=[theory_path], **ctx.obj)
                engine = ReasoningEngine(load_settings(chase_fuel=config.fuel, max_depth=config.max_depth,
                                                       max_size=config.max_size))
                code = fn(config, engine, _read(theory_path), **kwargs)
            except PositionedError as e:
                click.echo(f"{theory_path}:{e}", err=True)
                code = EXIT_ERROR
            except (EngineError, OSError, ValidationError, ValueError) as e:
                click.echo(f"{theory_path}: {e}", err=True)
                code = EXIT_ERROR
            ctx.exit(code)

        return wrapper

    return decorate


@click.group()
@click.option("--format", "output_format", type=click.Choice([f.value for f in OutputFormat]), default="text",
              help="Output format; dot is only available for force")
@click.option("--fuel", type=int, default=None, help="Chase fuel")
@click.option("--max-depth", type=int, default=None, help="Proof search depth bound")
@click.option("--max-size", type=int, default=None, help="Oracle domain size bound (at most 4)")
@click.option("--seed", type=int, default=0, help="Seed for generated theories")
@click.option("-v", "--verbose", count=True, help="Log debug output to stderr")
@click.pass_context
def cli(ctx: click.Context, output_format: str, fuel: Optional[int], max_depth: Optional[int],
        max_size: Optional[int], seed: int, verbose: int):
    """Coherent-logic reasoning engine: chase, dynamical proof search and forcing"""
    configure_logging(verbose)
    ctx.obj = dict(output_format=output_format, fuel=fuel, max_depth=max_depth, max_size=max_size,
                   seed=seed, verbosity=verbose)


@command("parse")
def parse_cmd(config: RunConfig, engine: ReasoningEngine, source: str) -> int:
    response = engine.parse(ParseRequest(theory=source))
    _emit(config, response, response.pretty + f"# fragment: {response.fragment}\n")
    return EXIT_OK


@command("morleyize")
@click.option("--target", type=click.Choice([t.value for t in MorleyTarget]), default="regular")
@click.option("--extras", "extras_path", default=None, help="File with one extra formula per line")
def morleyize_cmd(config: RunConfig, engine: ReasoningEngine, source: str, target: str,
                  extras_path: Optional[str]) -> int:
    extras = [line.strip() for line in _read(extras_path).splitlines() if line.strip()] if extras_path else []
    response = engine.morleyize(MorleyizeRequest(theory=source, target=MorleyTarget(target), extras=extras))
    aliases = "".join(f"# {name} := {text}\n" for name, text in sorted(response.aliases.items()))
    _emit(config, response, response.theory + aliases)
    return EXIT_OK


@command("chase")
@click.option("--diagram", "diagram_path", default=None, help="Initial diagram as JSON")
def chase_cmd(config: RunConfig, engine: ReasoningEngine, source: str, diagram_path: Optional[str]) -> int:
    diagram = DiagramModel.model_validate_json(_read(diagram_path)) if diagram_path else None
    response = engine.chase(ChaseRequest(theory=source, diagram=diagram, fuel=config.fuel))
    names = {e.id: e.name for e in response.diagram.domain}
    lines = [f"status: {response.status.value}", f"steps: {len(response.trace.steps)}",
             f"domain: {', '.join(names.values())}"]
    for fact in response.diagram.facts:
        separator = " = " if fact.rel == "=" else ", "
        args = separator.join(names[a] for a in fact.args)
        lines.append(args if fact.rel == "=" else f"{fact.rel}({args})")
    _emit(config, response, "\n".join(lines))
    return EXIT_OK


@command("prove")
@click.option("--sequent", required=True, help="Goal sequent, e.g. 'A(x) |- B(x)'")
def prove_cmd(config: RunConfig, engine: ReasoningEngine, source: str, sequent: str) -> int:
    response = engine.prove(ProveRequest(theory=source, sequent=sequent, max_depth=config.max_depth))
    if response.verdict == ProofStatus.PROVED:
        leaves = sum(len(c.bar) for c in response.certificates)
        text = f"proved at depth {response.depth}: {len(response.certificates)} certificates, {leaves} leaves"
    else:
        reason = "saturated open branch" if response.saturated else "depth bound reached"
        text = f"unknown at depth {response.depth} ({reason}); open branch {' -> '.join(map(str, response.open_branch))}"
    _emit(config, response, text)
    return EXIT_OK if response.verdict == ProofStatus.PROVED else EXIT_UNRESOLVED


@command("check-cert")
@click.option("--sequent", required=True)
@click.option("--certificate", "certificate_path", required=True,
              help="JSON list of certificates, or a prove response")
def check_cmd(config: RunConfig, engine: ReasoningEngine, source: str, sequent: str, certificate_path: str) -> int:
    raw = json.loads(_read(certificate_path))
    if isinstance(raw, dict):
        raw = raw.get("certificates", [])
    certificates = TypeAdapter(List[CertificateModel]).validate_python(raw)
    response = engine.check(CheckRequest(theory=source, sequent=sequent, certificates=certificates))
    text = "certificate accepted" if response.ok else f"certificate rejected at node {response.node}: {response.failure}"
    _emit(config, response, text)
    return EXIT_OK if response.ok else EXIT_UNRESOLVED


@command("force")
@click.option("--query", required=True, help="Formula with optional ctx, e.g. 'A(x) | B(x) ctx x'")
@click.option("--kind", type=click.Choice(sorted(KINDS)), default="beth-star")
@click.option("--depth", type=int, default=None, help="Beth tree depth")
@click.option("--root", "root_path", default=None, help="Root diagram as JSON")
@click.option("--chase-empty", is_flag=True, help="Root at the chase of the empty diagram (default)")
def force_cmd(config: RunConfig, engine: ReasoningEngine, source: str, query: str, kind: str,
              depth: Optional[int], root_path: Optional[str], chase_empty: bool) -> int:
    if root_path and chase_empty:
        raise ValueError("--root and --chase-empty are exclusive")
    root = DiagramModel.model_validate_json(_read(root_path)) if root_path else None
    request = ForceRequest(theory=source, query=query, kind=KINDS[kind], depth=depth, root=root)
    response = engine.force(request)
    if config.output_format == OutputFormat.DOT:
        click.echo(engine.force_dot(request), nl=False)
    else:
        rows = [f"{'  ' * n.depth}n{n.id}: {' '.join(v.value for v in n.verdicts)}" for n in response.nodes]
        text = f"{response.verdict.value} (skipped {response.skipped})\n" + "\n".join(rows)
        _emit(config, response, text)
    return EXIT_OK if response.verdict == Verdict.FORCED else EXIT_UNRESOLVED


@command("oracle")
@click.option("--sequent", required=True)
def oracle_cmd(config: RunConfig, engine: ReasoningEngine, source: str, sequent: str) -> int:
    response = engine.oracle(OracleRequest(theory=source, sequent=sequent, max_size=config.max_size))
    if response.valid:
        text = f"valid up to size {response.max_size} ({response.checked} models)"
    else:
        assignment = ", ".join(f"{v}={e}" for v, e in response.assignment.items())
        facts = ", ".join(f"{f.rel}({', '.join(map(str, f.args))})" for f in response.countermodel.facts)
        text = f"refuted by a model of size {len(response.countermodel.domain)} [{facts}] at {assignment or '()'}"
    _emit(config, response, text)
    return EXIT_OK if response.valid else EXIT_UNRESOLVED


@cli.command("generate")
@click.pass_context
def generate_cmd(ctx: click.Context):
    """Print a random terminating regular theory for the configured seed"""
    theory = random_regular_theory(random.Random(ctx.obj["seed"]))
    click.echo(pretty_theory(theory), nl=False)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        code = cli.main(args=argv, prog_name="coherent", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except click.exceptions.Abort:
        return EXIT_ERROR
    return code if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
