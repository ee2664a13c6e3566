"""
🔧 Núcleo del verificador: expresiones, jets, parches, cuádruplas
bihermíticas, álgebra compleja generalizada, eigendistribuciones y arnés.
"""
