from hypothesis import settings

# exact big-integer arithmetic makes single examples slow enough to trip timing checks
settings.register_profile("polyforge", deadline=None, derandomize=True)
settings.load_profile("polyforge")
