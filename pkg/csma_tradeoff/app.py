# Copyright 2025, Adria Cloud Services.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import argparse
import logging
import math
import sys

from csma_tradeoff.analysis import optimize
from csma_tradeoff.analysis.partition import ModelParams
from csma_tradeoff.analysis.partition import partition_recursive
from csma_tradeoff.analysis import roots
from csma_tradeoff.analysis import throughput
from csma_tradeoff.common import config
from csma_tradeoff.common.exceptions import CsmaError
from csma_tradeoff.common import utils
from csma_tradeoff import figures
from csma_tradeoff.network import simulate as sim
from csma_tradeoff.network import topology as topology_lib

LOG = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def run_partition(args):
    table = partition_recursive(args.beta, args.sigma, args.imax)
    rows = [(i, log_z, None if math.isinf(value) else value)
            for i, (log_z, value) in enumerate(zip(table.log_values, table.values()))]
    utils.write_csv(('i', 'log_Z', 'Z'), rows, args.out)


def run_roots(args):
    rows = roots.root_portrait(args.beta, [args.sigma])
    utils.write_csv(('beta', 'sigma', 'j', 're_lambda', 'im_lambda', 'method'), rows, args.out)


def run_throughput(args):
    if args.n is not None:
        params = ModelParams(beta=args.beta, eta=args.eta, sigma=args.sigma, n=args.n)
        result = throughput.throughput_finite(params)
    else:
        result = throughput.throughput_infinite(args.beta, args.eta, args.sigma)
    utils.write_csv(('kind', 'beta', 'eta', 'sigma', 'n', 'theta'),
                    [(result.kind, args.beta, args.eta, args.sigma, args.n, result.value)], args.out)


def run_optimize(args):
    beta_star, theta = optimize.max_throughput(args.eta, args.sigma)
    finite = None if args.n is None else optimize.optimal_beta_finite(args.n, args.eta, args.sigma)
    utils.write_csv(('eta', 'sigma', 'beta_star_continuous', 'theta', 'n', 'beta_star_finite_n'),
                    [(args.eta, args.sigma, beta_star, theta, args.n, finite)], args.out)


def run_threshold(args):
    result = optimize.threshold_interval(args.eta)
    sigmas = utils.linear_grid(args.sigma_min or result.bound_low, args.sigma_max or result.bound_high,
                               args.points)
    utils.write_csv(optimize.SWEEP_HEADER, optimize.threshold_sweep(args.eta, sigmas, args.n), args.out)


def run_topology(args):
    if args.kind == 'line':
        top = topology_lib.line_topology(args.n)
    elif args.kind == 'grid':
        top = topology_lib.wrapped_grid(args.rows, args.cols, args.spacing, args.m)
    else:
        top = topology_lib.random_topology(args.count, args.side, args.m, args.seed)
    if args.out is None or args.out == '-':
        sys.stdout.write(topology_lib.format_topology(top))
    else:
        topology_lib.write_topology(top, args.out)


def run_simulate(args):
    if args.init:
        config.save_experiment_config(args.init)
        print(f"Wrote experiment template to {args.init}")
        return
    if not args.config:
        raise CsmaError("simulate needs a config file or --init PATH")
    experiment = config.load_experiment_config(args.config)
    top = config.build_topology(experiment, args.config)
    tasks = [(key, top, cfg) for key, cfg in experiment.sim_configs()]
    LOG.info("Running %d simulations of %s on %s", len(tasks), experiment.name, top.name)
    results = sim.run_replications(tasks)
    rows = [row for _, stats in results for row in stats.rows()]
    out = args.out or experiment.output
    utils.write_csv(sim.RESULT_HEADER, rows, out)
    if out is not None and out != '-':
        for (beta, eta, sigma, seed), stats in results:
            print(f"{experiment.name}: beta={beta:g} eta={eta:g} sigma={sigma:g} seed={seed} "
                  f"throughput={stats.aggregate.throughput_mean:.6f} +/- {stats.aggregate.throughput_stderr:.6f}")


def run_figure(args):
    figure = figures.get_figure(args.name, n=args.n, eta=args.eta, seed=args.seed, beta=args.beta,
                                sigma=args.sigma, horizon=args.horizon)
    figure.write(args.out, argmax=args.argmax)


def _add_output(parser):
    parser.add_argument("--out", help="CSV output path (default: standard output)")


def parse_args():
    parser = argparse.ArgumentParser(
        description="Hidden/exposed node tradeoff of CSMA line networks: exact throughput, "
                    "optimal sensing range and a discrete-event simulator.",
        prog="csma-tradeoff",
    )
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    subparsers = parser.add_subparsers(dest='subparser_command', help='subcommand help', required=True)

    partition_parser = subparsers.add_parser("partition", help="Partition function Z_0..Z_imax of the line")
    partition_parser.add_argument("--beta", type=int, required=True, help="Sensing range")
    partition_parser.add_argument("--sigma", type=float, required=True, help="Activation rate")
    partition_parser.add_argument("--imax", type=int, required=True, help="Largest index")
    _add_output(partition_parser)
    partition_parser.set_defaults(func=run_partition)

    roots_parser = subparsers.add_parser("roots", help="Roots of lambda^(beta+1) - lambda^beta - sigma")
    roots_parser.add_argument("--beta", type=int, required=True, help="Sensing range")
    roots_parser.add_argument("--sigma", type=float, required=True, help="Activation rate")
    _add_output(roots_parser)
    roots_parser.set_defaults(func=run_roots)

    throughput_parser = subparsers.add_parser(
        "throughput",
        help="Throughput of node 0; finite network when --n is given (integer ranges), otherwise infinite"
    )
    throughput_parser.add_argument("--beta", type=float, required=True, help="Sensing range")
    throughput_parser.add_argument("--eta", type=float, required=True, help="Interference range")
    throughput_parser.add_argument("--sigma", type=float, required=True, help="Activation rate")
    throughput_parser.add_argument("--n", type=int, help="Half network size (2n+1 transmitters)")
    _add_output(throughput_parser)
    throughput_parser.set_defaults(func=run_throughput)

    optimize_parser = subparsers.add_parser("optimize", help="Throughput-optimal sensing range")
    optimize_parser.add_argument("--eta", type=int, required=True, help="Interference range")
    optimize_parser.add_argument("--sigma", type=float, required=True, help="Activation rate")
    optimize_parser.add_argument("--n", type=int, help="Also report the finite-network optimum")
    _add_output(optimize_parser)
    optimize_parser.set_defaults(func=run_optimize)

    threshold_parser = subparsers.add_parser("threshold", help="Threshold interval sweep")
    threshold_parser.add_argument("--eta", type=int, required=True, help="Interference range")
    threshold_parser.add_argument("--n", type=int, default=30, help="Finite network half size")
    threshold_parser.add_argument("--sigma-min", type=float, help="First sigma (default: lower analytic bound)")
    threshold_parser.add_argument("--sigma-max", type=float, help="Last sigma (default: upper analytic bound)")
    threshold_parser.add_argument("--points", type=int, default=21, help="Number of sigma values")
    _add_output(threshold_parser)
    threshold_parser.set_defaults(func=run_threshold)

    topology_parser = subparsers.add_parser("topology", help="Build a topology and write it in text form")
    topology_parser.add_argument("kind", choices=("line", "grid", "random"))
    topology_parser.add_argument("--n", type=int, default=3, help="Line half size")
    topology_parser.add_argument("--rows", type=int, default=4)
    topology_parser.add_argument("--cols", type=int, default=4)
    topology_parser.add_argument("--spacing", type=float, default=1.0)
    topology_parser.add_argument("--m", type=float, default=1.0, help="Transmission range")
    topology_parser.add_argument("--count", type=int, default=16, help="Random node count")
    topology_parser.add_argument("--side", type=float, default=3.0, help="Random placement square side")
    topology_parser.add_argument("--seed", type=int, default=0)
    topology_parser.add_argument("--out", help="Topology file (default: standard output)")
    topology_parser.set_defaults(func=run_topology)

    simulate_parser = subparsers.add_parser("simulate", help="Run the simulations of an experiment config")
    simulate_parser.add_argument("config", nargs="?", help="Experiment YAML file")
    simulate_parser.add_argument("--init", metavar="PATH", help="Write a template experiment config and exit")
    _add_output(simulate_parser)
    simulate_parser.set_defaults(func=run_simulate)

    figure_parser = subparsers.add_parser("figure", help="Data table behind a figure")
    figure_parser.add_argument("name", help="One of: " + ", ".join(figures.available_figures()))
    figure_parser.add_argument("--n", type=int)
    figure_parser.add_argument("--eta", type=float)
    figure_parser.add_argument("--beta", type=float)
    figure_parser.add_argument("--sigma", type=float)
    figure_parser.add_argument("--seed", type=int)
    figure_parser.add_argument("--horizon", type=float, help="Simulated time for simulation-backed figures")
    figure_parser.add_argument("--argmax", action="store_true",
                               help="Simulation figures only: write the empirically best beta per sigma instead")
    _add_output(figure_parser)
    figure_parser.set_defaults(func=run_figure)

    return parser


def main(argv=None):
    parser = parse_args()
    args = parser.parse_args(argv)
    args.prog = parser.prog
    logging.basicConfig(level=logging.DEBUG if args.debug else logging.WARNING, format=LOG_FORMAT,
                        stream=sys.stderr)
    try:
        args.func(args)
    except (CsmaError, OSError) as e:
        raise SystemExit(f"{parser.prog}: error: {e}")
