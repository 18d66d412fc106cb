import sys

from photodistill.cli import main

sys.exit(main())
