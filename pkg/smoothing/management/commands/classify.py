from smoothing.management.base import MeshCommand
from smoothing.models import WeightMode
from smoothing.smooth_surface import SurfaceConfig
from smoothing.surface import classify, estimate_normals


class Command(MeshCommand):
    help = "Label every node of a surface mesh as smooth, ridge, corner or boundary."

    flags = {"chi_c": "--chi-c", "chi_r": "--chi-r"}

    def add_arguments(self, parser):
        parser.add_argument("--input", required=True)
        parser.add_argument("--chi-c", type=float)
        parser.add_argument("--chi-r", type=float)
        parser.add_argument("--weight", choices=WeightMode.values, default=WeightMode.IDENTITY)

    def handle(self, *args, **options):
        # a flat file is still a (planar) surface here
        mesh = self.read_input(options["input"], 3)
        cfg = self.build_config(
            SurfaceConfig,
            chi_c=options["chi_c"],
            chi_r=options["chi_r"],
            weight_mode=options["weight"],
        )
        classification = classify(mesh, estimate_normals(mesh), cfg)
        for node, label in enumerate(classification.labels):
            self.stdout.write(f"{node} {label.value}")
