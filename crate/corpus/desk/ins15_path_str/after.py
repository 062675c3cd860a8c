def open_log(directory):
    path = os.path.join(str(directory), 'run.log')
    return open(path)
