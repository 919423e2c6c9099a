#
# Module to provide file utility functions for run directories and shards.
#   Last Modified: One access check for directories and files.
#
import os


def ensure_dir (apath):
  "Create the given directory (and its parents) if needed; return its full path."
  apath = full_path(apath)
  os.makedirs(apath, exist_ok=True)
  return apath


def full_path (apath):
  """ Fully expand the given path into an absolute path. Supports the home ('~') shortcut. """
  return os.path.abspath(os.path.normpath(os.path.expanduser(apath)))


def gen_file_paths (root_dir, extents=None):
  """
  Generator to yield the files directly under the given directory, in name order,
  optionally only those ending with one of the given extensions.
  """
  for fyl in sorted(os.listdir(root_dir)):
    file_path = os.path.join(root_dir, fyl)
    if (os.path.isfile(file_path) and ((extents is None) or fyl.endswith(tuple(extents)))):
      yield file_path


def good_dir_path (apath, writeable=False):
  "Tell whether the path names a readable (and optionally writeable) directory, following links."
  return _accessible(apath, os.path.isdir, writeable)


def good_file_path (apath, writeable=False):
  "Tell whether the path names a readable (and optionally writeable) file, following links."
  return _accessible(apath, os.path.isfile, writeable)


def truncate_torn_tail (apath):
  "Cut any bytes after the last newline of the file (a partly written line). Return the count cut."
  with open(apath, 'rb+') as fyl:
    data = fyl.read()
    keep = data.rfind(b'\n') + 1
    if (keep < len(data)):
      fyl.truncate(keep)
    return len(data) - keep


def write_atomic (apath, text):
  "Replace the file with the given text so readers never see a partial file."
  tmp_path = f"{apath}.tmp"
  with open(tmp_path, 'w') as fyl:
    fyl.write(text)
    fyl.flush()
    os.fsync(fyl.fileno())
  os.replace(tmp_path, apath)


def _accessible (apath, is_kind, writeable):
  mode = (os.R_OK | os.W_OK) if writeable else os.R_OK
  return bool(apath and is_kind(apath) and os.access(apath, mode))
