def open_log(directory):
    path = os.path.join(directory, 'run.log')
    return open(path)
