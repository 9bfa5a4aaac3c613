import functools
import json
import sys

import click

import app_tasks
import config
from core.errors import ShptError
from core.harness import summarize
from core.parsers import QueriesParser, ScriptParser

EXIT_FAILED = 1
EXIT_ERROR = 2


def handles_errors(command):
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ShptError as ex:
            click.echo('error: %s' % ex, err=True)
            sys.exit(EXIT_ERROR)
    return wrapper


def scenario_options(command):
    options = [
        click.option('--keys-file', type=click.Path(dir_okay=False), help='one binary key per line'),
        click.option('--random-keys', type=int, help='number of random keys'),
        click.option('--key-len', type=int, default=config.simulation['key_len'], show_default=True),
        click.option('--seed', type=int, default=config.simulation['seed'], show_default=True),
        click.option('--corruption', type=click.Choice(config.corruption_levels()), default='none',
                     show_default=True),
        click.option('--script', 'script_file', type=click.Path(dir_okay=False), help='corruption script to replay'),
        click.option('--max-rounds', type=int, default=config.simulation['max_rounds'], show_default=True),
        click.option('--peers', type=int, default=config.simulation['peers'], show_default=True),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def build_scenario(keys_file, random_keys, key_len, seed, corruption, script_file, max_rounds, peers,
                   strict=False) -> app_tasks.Scenario:
    keys = app_tasks.load_keys(keys_file, random_keys, key_len, seed)
    script = app_tasks.load_script(keys, corruption, script_file, seed, peers)
    return app_tasks.Scenario(keys, script, peers, max_rounds, strict)


@click.group()
@click.option('-v', '--verbose', is_flag=True, help='debug logging')
def cli(verbose):
    """Self-stabilizing hashed Patricia trie simulator"""
    config.configure_logging(verbose)


@cli.command()
@scenario_options
@click.option('--metrics-out', type=click.Path(dir_okay=False))
@click.option('--dump-out', type=click.Path(dir_okay=False), help='write the final state dump')
@click.option('--save-script', type=click.Path(dir_okay=False), help='write the corruption script used')
@click.option('--strict-quiescence', is_flag=True)
@handles_errors
def run(keys_file, random_keys, key_len, seed, corruption, script_file, max_rounds, peers, metrics_out, dump_out,
        save_script, strict_quiescence):
    """Corrupt one trie and run the protocol until it is legal"""
    scenario = build_scenario(keys_file, random_keys, key_len, seed, corruption, script_file, max_rounds, peers,
                              strict_quiescence)
    if save_script:
        ScriptParser.save(scenario.script, save_script)
    metrics, state = app_tasks.scenario_metrics(scenario)
    app_tasks.save_outputs(metrics, metrics_out, state, scenario.keys, dump_out)
    click.echo('keys: %d, converged: %s, rounds: %s, reads/timeout: %d, msgs/timeout: %d' % (
        metrics.num_keys, str(metrics.converged).lower(), metrics.rounds_to_legal,
        metrics.max_reads_per_timeout, metrics.max_msgs_per_timeout))
    if not metrics.converged:
        sys.exit(EXIT_FAILED)


@cli.command()
@click.option('--seeds', type=int, default=20, show_default=True, help='number of scenarios')
@click.option('--first-seed', type=int, default=0, show_default=True)
@click.option('--random-keys', type=int, default=config.simulation['random_keys'], show_default=True)
@click.option('--key-len', type=int, default=config.simulation['key_len'], show_default=True)
@click.option('--corruption', type=click.Choice(config.corruption_levels()), default='high', show_default=True)
@click.option('--max-rounds', type=int, default=config.simulation['max_rounds'], show_default=True)
@click.option('--peers', type=int, default=config.simulation['peers'], show_default=True)
@click.option('--workers', type=int, default=4, show_default=True)
@handles_errors
def sweep(seeds, first_seed, random_keys, key_len, corruption, max_rounds, peers, workers):
    """Run a batch of seeded scenarios and aggregate convergence statistics"""
    runs = app_tasks.sweep(range(first_seed, first_seed + seeds), random_keys, key_len, corruption, peers,
                           max_rounds, workers)
    summary = summarize(runs)
    click.echo(json.dumps(summary, indent=2))
    if summary['converged'] != summary['runs']:
        sys.exit(EXIT_FAILED)


@cli.command()
@scenario_options
@click.option('--queries-file', type=click.Path(dir_okay=False), required=True, help='one query per line')
@handles_errors
def query(keys_file, random_keys, key_len, seed, corruption, script_file, max_rounds, peers, queries_file):
    """Stabilize a trie and answer prefix search queries"""
    scenario = build_scenario(keys_file, random_keys, key_len, seed, corruption, script_file, max_rounds, peers)
    stats, state = app_tasks.run_scenario(scenario)
    if not stats.converged:
        click.echo('not legal after %d rounds' % stats.rounds, err=True)
        sys.exit(EXIT_FAILED)
    answers = app_tasks.answer_queries(state, scenario.keys, QueriesParser.load(queries_file))
    for answer in answers:
        click.echo('%s %s %d' % (answer.result.query or "''", answer.result.key, answer.result.reads))
    wrong = [a.result.query for a in answers if not a.correct]
    if wrong:
        click.echo('answers without the longest common prefix: %s' % ', '.join(wrong), err=True)
        sys.exit(EXIT_FAILED)


@cli.command()
@click.argument('dump', type=click.Path(dir_okay=False))
@click.option('--strict-quiescence', is_flag=True)
@handles_errors
def check(dump, strict_quiescence):
    """Check a state dump against the legal state"""
    report = app_tasks.check_dump_file(dump, strict_quiescence)
    click.echo('legal: %s' % str(report.legal).lower())
    for v in report.violations:
        click.echo('%s %r: %s' % (v.rule, v.label, v.description))
    if not report.legal:
        sys.exit(EXIT_FAILED)


@cli.command()
def serve():
    """Start the HTTP interface"""
    from app import App
    App(__name__).start()


if __name__ == '__main__':
    cli()
