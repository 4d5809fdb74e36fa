"""
Subcommands of the ``plp`` command line, one ``*_command.py`` module each.
"""
