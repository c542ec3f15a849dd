from complexes.dataclasses import FreeComplex
from complexes.operations import check_complex
from core.errors import HeightAmplitudeViolated
from graded.height_amplitude import verify_height_amplitude
from cli.io import ReportCommand, load


class Command(ReportCommand):
    help = "Checks the height/amplitude statements on a minimal complex over F_p[T_1..T_q]."

    def add_command_arguments(self, parser):
        parser.add_argument('complex', type=str, help="Complex file over F_p[T_1..T_q]")

    def run(self, **options):
        C = load(options['complex'], FreeComplex.from_dict)
        check_complex(C)
        report = verify_height_amplitude(C)
        if not report.part_i or report.part_ii == "fail" or report.part_iii.passed is False:
            raise HeightAmplitudeViolated("height/amplitude check failed", report=report.to_dict())
        return report.to_dict(), str(report)
