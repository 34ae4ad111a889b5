"""
debranges-lab data package.

JSON and CSV codecs for functions, operators and reports.
"""
