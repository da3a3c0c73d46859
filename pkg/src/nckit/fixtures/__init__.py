# Bundled network documents (*.nc); load them via nckit.network.load_fixture.
