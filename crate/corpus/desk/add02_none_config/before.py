def timeout_of(settings):
    config = settings.get('net')
    return config.timeout
