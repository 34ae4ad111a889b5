"""
debranges-lab services package.

Report assembly for the CLI subcommands and the worked-example reproductions.
"""
