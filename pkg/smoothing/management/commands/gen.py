from smoothing.constants import CLI_GEN_KINDS, CLI_LIFTS, DEFAULT_MIXED_FRACTION
from smoothing.management.base import MeshCommand
from smoothing.meshgen import GenSpec, generate


def _seed(value: str) -> int:
    # accepts decimal or 0x-prefixed hex
    return int(value, 0)


class Command(MeshCommand):
    help = "Write a seeded synthetic mesh: perturbed grids, mixed grids, lifted surfaces or a cube shell."

    flags = {
        "nx": "--nx",
        "ny": "--ny",
        "perturb": "--perturb",
        "seed": "--seed",
        "mixed_fraction": "--mixed-fraction",
        "lift": "--lift",
    }

    def add_arguments(self, parser):
        parser.add_argument("--kind", required=True, choices=list(CLI_GEN_KINDS))
        parser.add_argument("--nx", type=int, required=True, help="nodes per row (per cube edge for cube-shell)")
        parser.add_argument("--ny", type=int, help="nodes per column, default nx")
        parser.add_argument("--perturb", type=float, default=0.0, help="maximum interior node offset in cell units, below 0.5")
        parser.add_argument("--seed", type=_seed, default=0)
        parser.add_argument("--lift", choices=list(CLI_LIFTS), default="none")
        parser.add_argument("--mixed-fraction", type=float, default=DEFAULT_MIXED_FRACTION)
        parser.add_argument("--output", required=True)

    def handle(self, *args, **options):
        spec = self.build_config(
            GenSpec,
            kind=CLI_GEN_KINDS[options["kind"]],
            nx=options["nx"],
            ny=options["ny"] if options["ny"] is not None else options["nx"],
            perturb=options["perturb"],
            seed=options["seed"],
            lift=CLI_LIFTS[options["lift"]],
            mixed_fraction=options["mixed_fraction"],
        )
        mesh = generate(spec)
        self.write_output(mesh, options["output"])
        self.stdout.write(f"{options['output']}: {mesh.n_nodes} nodes, {mesh.n_elements} elements, {mesh.dimension}D")
