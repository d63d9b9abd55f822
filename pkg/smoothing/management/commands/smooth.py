from functools import partial

from django.conf import settings
from django.core.management.base import CommandError

from smoothing.exceptions import MeshError
from smoothing.management.base import EXIT_NOT_CONVERGED, MeshCommand, boolean, format_quality
from smoothing.models import MeshKind, Method, ReportFormat, WeightMode
from smoothing.smooth_planar import PlanarConfig, smooth_planar
from smoothing.smooth_surface import SurfaceConfig, smooth_surface


class Command(MeshCommand):
    help = "Smooth a planar or surface mesh with the modified direct method or Laplacian smoothing."

    flags = {
        "tol": "--tol",
        "max_iter": "--max-iter",
        "eps_mq": "--eps-mq",
        "eps_mse": "--eps-mse",
        "chi_c": "--chi-c",
        "chi_r": "--chi-r",
        "threads": "--threads",
    }

    def add_arguments(self, parser):
        parser.add_argument("--input", required=True, help="OBJ or OFF mesh to smooth")
        parser.add_argument("--output", required=True, help="where to write the smoothed mesh (.obj or .off)")
        parser.add_argument("--mode", choices=["planar", "surface"], help="default: planar for 2D input, surface for 3D")
        parser.add_argument("--method", choices=Method.values, default=Method.MDM)
        parser.add_argument("--tol", type=float, help="planar: maximum node displacement to stop at")
        parser.add_argument("--tol-absolute", action="store_true", help="--tol is in mesh units, not a fraction of the bounding box diagonal")
        parser.add_argument("--max-iter", type=int)
        parser.add_argument("--eps-mq", type=float)
        parser.add_argument("--eps-mse", "--eps-msE", dest="eps_mse", type=float)
        parser.add_argument("--chi-c", type=float)
        parser.add_argument("--chi-r", type=float)
        parser.add_argument("--weight", choices=WeightMode.values, default=WeightMode.IDENTITY)
        parser.add_argument("--preset", choices=MeshKind.values, help="surface: stopping thresholds used for this kind of mesh")
        parser.add_argument("--fix-boundary", type=boolean, default=True)
        parser.add_argument("--report", help="write the per-iteration MQ/MSE history here")
        parser.add_argument("--report-format", choices=ReportFormat.values)
        parser.add_argument("--threads", type=int, default=settings.MDM_THREADS)
        parser.add_argument("--dimension", type=int, choices=[2, 3], help="read the input as 2D or 3D instead of detecting it")
        parser.add_argument("--force", action="store_true", help="surface mode on a flat file: read it as a 3D mesh at its constant z")

    def handle(self, *args, **options):
        dimension = options["dimension"]
        if dimension is None and options["force"] and options["mode"] == "surface":
            dimension = 3
        mesh = self.read_input(options["input"], dimension)
        mode = options["mode"] or ("planar" if mesh.dimension == 2 else "surface")

        if mode == "surface" and mesh.dimension == 2:
            raise CommandError(f"--input {options['input']}: 2D mesh cannot be smoothed in surface mode, pass --force to read it as 3D")
        if mode == "planar" and mesh.dimension == 3:
            raise CommandError(f"--input {options['input']}: 3D mesh cannot be smoothed in planar mode, use --mode surface")

        try:
            if mode == "planar":
                if not options["fix_boundary"]:
                    self.stderr.write("boundary nodes are free to move (--fix-boundary false)")
                cfg = self.build_config(
                    PlanarConfig,
                    tol=options["tol"],
                    tol_absolute=options["tol_absolute"],
                    max_iter=options["max_iter"],
                    method=options["method"],
                    fix_boundary=options["fix_boundary"],
                )
                result = smooth_planar(mesh, cfg)
            else:
                values = dict(
                    eps_mq=options["eps_mq"],
                    eps_mse=options["eps_mse"],
                    chi_c=options["chi_c"],
                    chi_r=options["chi_r"],
                    max_iter=options["max_iter"],
                    weight_mode=options["weight"],
                    method=options["method"],
                    threads=options["threads"],
                )
                factory = SurfaceConfig
                if options["preset"]:
                    # explicit --eps-* flags win over the preset
                    factory = partial(SurfaceConfig.from_preset, options["preset"])
                cfg = self.build_config(factory, **values)
                result = smooth_surface(mesh, cfg)
        except MeshError as e:
            raise CommandError(f"--input {options['input']}: {e}")

        self.write_output(result.mesh, options["output"])
        if options["report"]:
            self.write_report(result.report, options["report"], options["report_format"])

        status = "converged" if result.converged else "not converged"
        self.stdout.write(f"{mode} {Method(options['method']).value}: {result.iterations} iteration(s), {status}")
        first, last = result.initial, result.history[-1]
        for kind in ("tri", "quad"):
            if getattr(first, f"mq_{kind}") is None:
                continue
            self.stdout.write(
                f"{kind:<5} MQ {format_quality(getattr(first, f'mq_{kind}'))} -> {format_quality(getattr(last, f'mq_{kind}'))}"
                f"  MSE {format_quality(getattr(first, f'mse_{kind}'))} -> {format_quality(getattr(last, f'mse_{kind}'))}"
            )
        if result.classification is not None:
            counts = {str(label.value): len(result.classification.nodes_with(label)) for label in set(result.classification.labels)}
            self.stdout.write("nodes " + ", ".join(f"{label}: {count}" for label, count in sorted(counts.items())))

        if not result.converged:
            raise CommandError(
                f"no convergence within {result.iterations} iterations, result written to {options['output']}",
                returncode=EXIT_NOT_CONVERGED,
            )
