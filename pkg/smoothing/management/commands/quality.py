from smoothing.management.base import MeshCommand, format_quality
from smoothing.models import ReportFormat, ReportRecord
from smoothing.quality import summarize


class Command(MeshCommand):
    help = "Print the mean quality (MQ) and spread (MSE) of a mesh per element type."

    def add_arguments(self, parser):
        parser.add_argument("--input", required=True)
        parser.add_argument("--report", help="also write the summary as a one-record report")
        parser.add_argument("--report-format", choices=ReportFormat.values)
        parser.add_argument("--dimension", type=int, choices=[2, 3])

    def handle(self, *args, **options):
        mesh = self.read_input(options["input"], options["dimension"])
        summary = summarize(mesh)

        self.stdout.write(f"{options['input']}: {mesh.n_nodes} nodes, {summary.n_tri} triangles, {summary.n_quad} quads")
        if summary.n_tri:
            self.stdout.write(f"tri   MQ {format_quality(summary.mq_tri)}  MSE {format_quality(summary.mse_tri)}")
        if summary.n_quad:
            self.stdout.write(f"quad  MQ {format_quality(summary.mq_quad)}  MSE {format_quality(summary.mse_quad)}")

        if options["report"]:
            self.write_report([ReportRecord.from_summary(0, summary)], options["report"], options["report_format"])
