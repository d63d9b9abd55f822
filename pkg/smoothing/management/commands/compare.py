from django.core.management.base import CommandError

from smoothing.exceptions import MeshError
from smoothing.management.base import MeshCommand, format_quality
from smoothing.models import Method
from smoothing.smooth_planar import PlanarConfig, smooth_planar
from smoothing.smooth_surface import SurfaceConfig, smooth_surface

COLUMNS = ("mq_tri", "mse_tri", "mq_quad", "mse_quad")
HEADERS = ("T-MQ", "T-MSE", "Q-MQ", "Q-MSE")


class Command(MeshCommand):
    help = "Smooth one mesh with Laplacian smoothing and with MDM and tabulate MQ/MSE against the input."

    flags = {"tol": "--tol", "max_iter": "--max-iter"}

    def add_arguments(self, parser):
        parser.add_argument("--input", required=True)
        parser.add_argument("--max-iter", type=int)
        parser.add_argument("--tol", type=float, help="planar inputs only")

    def handle(self, *args, **options):
        mesh = self.read_input(options["input"])

        rows = []
        for label, method in (("LS", Method.LAPLACIAN), ("MDM", Method.MDM)):
            try:
                if mesh.dimension == 2:
                    cfg = self.build_config(PlanarConfig, method=method, tol=options["tol"], max_iter=options["max_iter"])
                    result = smooth_planar(mesh, cfg)
                else:
                    cfg = self.build_config(SurfaceConfig, method=method, max_iter=options["max_iter"])
                    result = smooth_surface(mesh, cfg)
            except MeshError as e:
                raise CommandError(f"--input {options['input']}: {e}")
            if not rows:
                rows.append(("Original", result.initial, None))
            rows.append((label, result.history[-1], result))

        self.stdout.write(f"{'':<9}" + "".join(f"{h:>10}" for h in HEADERS) + f"{'iter':>6}")
        for label, record, result in rows:
            values = "".join(f"{format_quality(getattr(record, c)):>10}" for c in COLUMNS)
            iterations = "" if result is None else f"{result.iterations:>5}{'' if result.converged else '*'}"
            self.stdout.write(f"{label:<9}{values} {iterations}")
