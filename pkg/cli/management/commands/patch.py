from patcher.certify import certify
from patcher.dataclasses import PatchingTower
from patcher.pigeonhole import patch
from cli.io import ReportCommand, load


class Command(ReportCommand):
    help = "Patches a tower to the requested precision and certifies the limit."

    def add_command_arguments(self, parser):
        parser.add_argument('tower', type=str, help="Tower file")
        parser.add_argument(
            '--precision',
            type=int,
            default=2,
            help="Target precision N of the limit complex"
        )

    def run(self, **options):
        T = load(options['tower'], PatchingTower.from_dict)
        certificate = certify(T, patch(T, options['precision']))
        return certificate.to_dict(), str(certificate)
