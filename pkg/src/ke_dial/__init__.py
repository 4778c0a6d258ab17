def main() -> None:
    from ke_dial.cli import main as cli_main

    raise SystemExit(cli_main())
