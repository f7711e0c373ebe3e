#!/usr/bin/env python3
"""
Search the internal gadget orders and write the shipped table.

Usage:
    python scripts/derive_gadget_table.py
    python scripts/derive_gadget_table.py --output /tmp/table.pref --no-elimination

The corpus is the parallel pair, the parallel class of three and the
triangle with a doubled side from fixtures/. The first passing table is
written; the shipped file is kept when it still passes.
"""
import argparse
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from dotenv import load_dotenv
load_dotenv()

from kernelkit.config import configure_logging, settings
from kernelkit.exceptions import InvalidTable, KernelKitError
from kernelkit.services import formats
from kernelkit.services.gadget import derive_internal_orders, load_default_table

CORPUS = ('parpair.pref', 'parclass3.pref', 'partri.pref')


def main():
    """Main function."""
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    parser.add_argument('--output', type=Path, default=settings.default_gadget_table)
    parser.add_argument('--no-elimination', action='store_true', help='skip the elimination test')
    args = parser.parse_args()
    configure_logging('INFO')

    print("=" * 70)
    print("Gadget internal order search")
    print("=" * 70)

    try:
        corpus = [
            formats.parse_preferences((settings.fixtures_dir / name).read_text(encoding='utf-8'))
            for name in CORPUS
        ]
        tables = derive_internal_orders(corpus, check_elimination=not args.no_elimination)
    except (OSError, KernelKitError) as e:
        print(f"❌ Search failed: {e}")
        sys.exit(1)

    print(f"✓ {len(tables)} table(s) pass")
    try:
        shipped = load_default_table()
    except InvalidTable:
        shipped = None
    chosen = shipped if shipped in tables else tables[0]
    if chosen is shipped:
        print("✓ Shipped table still passes; keeping it")

    header = (
        "# Internal orders of the parallel-edge gadget, most preferred first.\n"
        "# Regenerate with scripts/derive_gadget_table.py.\n"
    )
    args.output.write_text(header + chosen.to_text(), encoding='utf-8')
    print(f"✓ Wrote {args.output}")
    print()
    print(chosen.to_text())


if __name__ == '__main__':
    main()
