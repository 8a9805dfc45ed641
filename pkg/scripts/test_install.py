"""Import every consensus_lab module to check an installed distribution"""
import importlib
import pkgutil

import consensus_lab

modules = [
    info.name
    for info in pkgutil.walk_packages(consensus_lab.__path__, prefix="consensus_lab.")
]
for name in modules:
    importlib.import_module(name)

print("consensus_lab {}: imported {} modules".format(consensus_lab.__version__, len(modules)))
