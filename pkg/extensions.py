"""Shared CLI objects - defined separately to avoid circular imports"""
import json

import click


class Services:
    """Pipeline services built once in app.py and handed to every command"""

    def __init__(self, config, ingestor, runner, writer):
        self.config = config
        self.ingestor = ingestor
        self.runner = runner
        self.writer = writer


pass_services = click.make_pass_decorator(Services)


def echo_json(data):
    """Command output: stable key order, floats as round-trip repr"""
    click.echo(json.dumps(data, sort_keys=True, indent=2))
